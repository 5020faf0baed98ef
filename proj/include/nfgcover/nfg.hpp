#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nfgcover/tensor.hpp"

namespace nfgcover {

struct Edge {
  std::string id;
  int cardinality = 2;
  bool half = false;
};

struct Factor {
  std::string id;
  /// Argument order equals tensor axis order.
  std::vector<std::string> args;
  DenseTensor tensor;

  std::size_t degree() const noexcept { return args.size(); }
};

/// Normal factor graph: variables live on edges, local functions on nodes.
/// A full edge is referenced by exactly two factor slots (possibly on the same
/// factor), a half edge by exactly one.
struct Nfg {
  std::string name;
  std::vector<Edge> edges;
  std::vector<Factor> factors;
  /// Transformed graphs may carry negative entries.
  bool is_signed = false;

  std::optional<std::size_t> edge_index(const std::string& id) const;
  std::optional<std::size_t> factor_index(const std::string& id) const;
  const Edge& edge(const std::string& id) const;
  const Factor& factor(const std::string& id) const;
  bool has_half_edges() const;
  bool all_binary() const;
};

using Configuration = std::map<std::string, int>;

/// Factor slot at which an edge is attached.
struct Slot {
  std::size_t factor = 0;
  std::size_t position = 0;

  friend auto operator<=>(const Slot&, const Slot&) = default;
};

/// Slots of every edge in canonical order (factor file order, then slot
/// order). Indexed like nfg.edges.
std::vector<std::vector<Slot>> edge_slots(const Nfg& nfg);

struct Diagnostic {
  std::string invariant;
  std::string element;
  std::string message;
};

/// Empty iff the graph is well formed.
std::vector<Diagnostic> validate(const Nfg& nfg);
/// Throws Error(InvalidGraph) listing the first diagnostic.
void require_valid(const Nfg& nfg);

double global_function(const Nfg& nfg, const Configuration& config);

struct EnumerationOptions {
  std::uint64_t cap = std::uint64_t{1} << 28;
};

/// Sign-tracked log-magnitude; sign 0 means the value is exactly zero.
struct SignedLog {
  int sign = 0;
  double log_abs = 0.0;

  static SignedLog from(double v);
  double value() const;
  SignedLog& operator+=(const SignedLog& other);
};

/// Exact partition sum by exhaustive enumeration. Configurations whose
/// partial product is already zero are skipped; the cap bounds the number of
/// search nodes visited (Error(EnumerationCapExceeded) beyond it).
double partition_sum(const Nfg& nfg, const EnumerationOptions& opts = {});
SignedLog partition_sum_log(const Nfg& nfg,
                            const EnumerationOptions& opts = {});

using Matrix2 = std::array<std::array<double, 2>, 2>;

Matrix2 matrix_of(const Factor& f);
Matrix2 matrix_of(const DenseTensor& t);
double det_of(const Matrix2& m);
double perm_of(const Matrix2& m);

bool is_log_supermodular(const DenseTensor& t);
bool is_log_submodular(const DenseTensor& t);

DenseTensor equality_tensor(int degree, int cardinality = 2);
bool is_equality_tensor(const DenseTensor& t);

}  // namespace nfgcover
