#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nfgcover/covers.hpp"
#include "nfgcover/mdc.hpp"
#include "nfgcover/nfg.hpp"

namespace nfgcover {

using Matrix4 = std::array<std::array<double, 4>, 4>;

/// Symmetric, self-inverse 4x4 transform acting on the pair alphabet.
const Matrix4& phi_matrix();

/// Contracts phi_matrix() onto every axis. All axes must have cardinality 4.
DenseTensor transform_tensor(const DenseTensor& t);

/// Degree-2 gate that replaces a crossing factor, its switch factor and the
/// two adjacent transform nodes: diag(1, 1, p0 - p1, 1).
struct EdgeGate {
  std::array<double, 4> diagonal{1.0, 1.0, 1.0, 1.0};

  DenseTensor to_tensor() const;
};

EdgeGate edge_gate(double p0, double p1);

struct TransformedNfg {
  Nfg graph;
  ConstructionMap map;
};

/// Replaces every merged factor by its transform and every (crossing factor,
/// switch edge, switch factor) cluster by the closed-box gate. Throws
/// Error(NotAnMdc) if the map does not describe the graph.
TransformedNfg transform_mdc(const Nfg& mdc, const ConstructionMap& map);

/// Square root of the partition sum of the transformed averaged MDC-NFG.
double bethe2_via_transform(const Nfg& nfg, const EnumerationOptions& opts = {});

/// Conditional matrix of a binary degree-3 tensor with argument `axis`
/// (0-based) fixed to `value`; rows follow the lower remaining axis.
Matrix2 conditional_matrix(const DenseTensor& t, int axis, int value);

/// Transformed merged table of a binary degree-2 function, assembled from the
/// entrywise formulas (corner squares, sqrt(2) cross terms, permanent, and
/// determinant).
DenseTensor closed_form_degree2(const DenseTensor& t);
DenseTensor closed_form_degree2(const Factor& f);

/// Transformed merged table of a binary degree-3 function, computed with the
/// general transform.
DenseTensor closed_form_degree3(const DenseTensor& t);
DenseTensor closed_form_degree3(const Factor& f);

/// The 4x4x4 array exactly as printed in the published table, cell by cell.
/// Cells whose printed formula is suspect are marked in `flagged`
/// (indexed by flat offset).
struct PrintedDegree3 {
  DenseTensor values;
  std::vector<bool> flagged;
};
PrintedDegree3 printed_degree3(const DenseTensor& t);

struct FlaggedCell {
  std::array<int, 3> index{};
  std::string printed_formula;
  std::string resolved_formula;
  double printed = 0.0;
  double resolved = 0.0;
  double transform = 0.0;
};

struct Degree3Verification {
  int cells_compared = 0;
  double max_abs_diff = 0.0;
  std::vector<FlaggedCell> flagged;

  /// Unflagged cells agree within 1e-12 and every resolved formula matches
  /// the transform within 1e-12.
  bool passed() const;
};

Degree3Verification verify_degree3_printed(const DenseTensor& t);

/// Transformed merged equality indicator of degree d >= 2: 1 at the all-0 and
/// all-3 corners, 2^(1-d/2) where every symbol is 1 or 2 and the number of
/// 2s is even, 0 elsewhere.
DenseTensor closed_form_equality(int d);

struct NonnegativeCheck {
  bool nonnegative = false;
  double min_entry = 0.0;
  double max_entry = 0.0;
};

/// Checks that the transformed merged tensor of a binary degree-2 or degree-3
/// log-supermodular function has no negative entry (relative slack 1e-12).
/// With require_lsm = false the precondition is skipped.
NonnegativeCheck check_nonnegative_transform(const DenseTensor& t,
                                             bool require_lsm = true);

/// s0 = g t000 t111, s1 = g t100 t011, s2 = g t010 t101, s3 = g t001 t110.
struct LemmaQuantities {
  std::array<double, 4> s{};
  /// The four signed combinations that make up the f^(.,.,.) cells.
  std::array<double, 4> combinations{};

  bool inequalities_hold() const;
  bool combinations_nonnegative() const;
};

LemmaQuantities lemma_quantities(const DenseTensor& t);

/// Binary, no half edges, factors of degree 2 or 3, or equality indicators
/// of degree >= 2. Log-supermodularity is checked separately. Returns the
/// first violation or empty.
std::string class_violation(const Nfg& nfg);

struct SignViolation {
  std::uint64_t configuration = 0;
  std::string kind;
  double g = 0.0;
  double g_trivial = 0.0;
};

struct SignStructureReport {
  std::uint64_t configurations = 0;
  std::vector<SignViolation> violations;
  double z_cover = 0.0;
  double z_trivial = 0.0;
  double z_base = 0.0;
  bool bound_holds = false;

  bool passed() const { return violations.empty() && bound_holds; }
};

/// Compares the transformed graphs of the given double cover and of the
/// trivial double cover configuration by configuration (one pair symbol per
/// base edge, 4^|E| terms).
SignStructureReport check_sign_structure(const Nfg& nfg, const CoverSpec& spec,
                                         const EnumerationOptions& opts = {});

}  // namespace nfgcover
