#pragma once

// Small dense linear programming: a two-phase tableau simplex with Bland's
// rule, and double-description vertex enumeration of bounded polytopes
// { x : a_i . x >= b_i }.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace bentcert::polytope {

/// a . x >= bound
struct Constraint {
  std::vector<double> coefficients;
  double bound = 0.0;
};

struct LinearProgram {
  std::vector<double> objective;  // maximized; variables are free
  std::vector<Constraint> constraints;

  std::size_t variables() const noexcept { return objective.size(); }
  /// Throws InvalidInput for ragged rows or more than 32 variables.
  void validate() const;
  /// min_i (a_i . x - b_i); nonnegative iff x is feasible.
  double min_slack(const std::vector<double>& x) const;
  double value(const std::vector<double>& x) const;
};

enum class LpStatus { optimal, infeasible, unbounded };

std::string to_string(LpStatus status);

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double pivot_tol = 1e-11;
  int max_pivots = 100000;
  int verbosity = 0;             // > 0 dumps every tableau to `trace`
  std::ostream* trace = nullptr;
};

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double value = 0.0;
  std::vector<double> point;
  int pivots = 0;
};

/// Deterministic: identical inputs produce identical pivot sequences.
LpResult lp_maximize(const LinearProgram& lp, const SimplexOptions& options = {});

struct Vertex {
  std::vector<double> point;
  int active = 0;        // constraints tight within the tolerance
  int active_rank = 0;   // rank of the tight rows
  bool flagged = false;  // active_rank < n after the perturbation fallback
};

// Order in which constraints enter the double-description iteration. The
// vertex set does not depend on it; the size of intermediate cones does.
enum class InsertionOrder { given, reversed, lexmin };

struct EnumerationOptions {
  double tol = 1e-9;
  double dedup_tol = 1e-9;
  InsertionOrder order = InsertionOrder::lexmin;
};

/// All vertices of the bounded polytope defined by lp.constraints (the
/// objective is ignored). Throws NumericalError when the region is
/// unbounded. Output is sorted lexicographically and deduplicated.
std::vector<Vertex> enumerate_vertices(const LinearProgram& lp, const EnumerationOptions& options = {});

/// Vertices x of the polytope with objective(x) >= value - tol.
std::vector<Vertex> optimal_face_vertices(const LinearProgram& lp, double value, double tol,
                                          const EnumerationOptions& options = {});

/// Collects the constraints tight at `approx` (|a.x - b| <= tol relative to
/// the row norm), records their count and rank, and when they determine a
/// point re-solves them; the re-solved point replaces `approx` if it moved by
/// at most max(1e-7, 100 tol).
Vertex polish_vertex(const LinearProgram& lp, const std::vector<double>& approx, double tol);

/// Merges points that agree coordinatewise up to single-linkage clusters of
/// gap tol; keeps the lexicographically smallest representative. Output is
/// sorted lexicographically and independent of input order.
std::vector<std::vector<double>> deduplicate(std::vector<std::vector<double>> points, double tol);

/// Class label per point under the same equivalence; labels are numbered in
/// lexicographic order of the class representatives.
std::vector<std::size_t> equivalence_classes(const std::vector<std::vector<double>>& points, double tol);

}  // namespace bentcert::polytope
