#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>

#include "bentcert/error.hpp"
#include "bentcert/families.hpp"
#include "bentcert/parallel.hpp"

namespace bentcert::families {

namespace {

constexpr int kTail = kBloch - 1;
const double kSqrt15 = std::sqrt(15.0);

std::vector<CMatrix> bloch_terms() {
  const auto g = qmat::operator_basis(4, qmat::BasisKind::pauli_tensor_quarter).elements;
  std::vector<CMatrix> t;
  for (const auto& gk : g) t.push_back(kron(gk, gk));
  return t;
}

int count_sigma2(int k) { return (k / 4 == 2) + (k % 4 == 2); }

SignStructure derive_sign_structure() {
  const auto terms = bloch_terms();
  // Generic combination: distinct irrational weights separate the 16 joint
  // eigenspaces.
  CMatrix h(16, 16);
  for (int k = 1; k < kBloch; ++k) h += terms[static_cast<std::size_t>(k)] * cplx(std::sqrt(2.0 + k) + 0.1 * k * k);
  const auto eig = qmat::eig_hermitian(h);
  for (std::size_t j = 1; j < eig.values.size(); ++j)
    if (eig.values[j] - eig.values[j - 1] < 1e-6)
      throw NumericalError("sign_structure: degenerate generic combination");

  SignStructure s;
  s.eigenbasis = eig.vectors;
  for (int j = 0; j < kBloch; ++j) {
    std::vector<cplx> v(16);
    for (std::size_t r = 0; r < 16; ++r) v[r] = eig.vectors(r, static_cast<std::size_t>(j));
    for (int k = 1; k < kBloch; ++k) {
      const CMatrix& t = terms[static_cast<std::size_t>(k)];
      // 4 <v| g_k (x) g_k |v>, and the residual of the eigen-equation.
      cplx q = 0.0;
      for (std::size_t a = 0; a < 16; ++a)
        for (std::size_t b = 0; b < 16; ++b) q += std::conj(v[a]) * t(a, b) * v[b];
      const double m = 4.0 * q.real();
      const int sign = m > 0 ? 1 : -1;
      double resid = 0.0;
      for (std::size_t a = 0; a < 16; ++a) {
        cplx tv = 0.0;
        for (std::size_t b = 0; b < 16; ++b) tv += t(a, b) * v[b];
        resid = std::max(resid, std::abs(tv - 0.25 * sign * v[a]));
      }
      if (std::fabs(m - sign) > 1e-9 || resid > 1e-10) {
        std::ostringstream msg;
        msg << "sign_structure: entry (" << j << "," << k << ") is " << m << ", residual " << resid;
        throw NumericalError(msg.str());
      }
      s.M[static_cast<std::size_t>(j)][static_cast<std::size_t>(k - 1)] = sign;
    }
  }
  for (int k = 1; k < kBloch; ++k) {
    const auto& t = terms[static_cast<std::size_t>(k)];
    const auto pt = qmat::partial_transpose(BipartiteOperator(4, 4, t)).entries();
    const double dk = hs_inner(t, pt).real();  // t has unit HS norm
    const int sign = dk > 0 ? 1 : -1;
    if (std::fabs(dk - sign) > 1e-12 || hs_norm(pt - t * cplx(sign)) > 1e-12)
      throw NumericalError("sign_structure: partial transpose is not diagonal on the Bloch terms");
    if (sign != (count_sigma2(k) % 2 ? -1 : 1))
      throw NumericalError("sign_structure: partial transpose sign disagrees with the sigma_2 count");
    s.D[static_cast<std::size_t>(k - 1)] = sign;
  }
  return s;
}

std::array<double, kBloch> linear_spectrum(const std::array<double, kBloch>& x, bool transposed) {
  const auto& s = sign_structure();
  std::array<double, kBloch> out{};
  for (std::size_t j = 0; j < kBloch; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < static_cast<std::size_t>(kTail); ++k)
      acc += s.M[j][k] * (transposed ? s.D[k] : 1) * x[k + 1];
    out[j] = 0.25 * acc + 1.0 / 16.0;
  }
  return out;
}

BlochCoeffs from_one_based(const std::vector<std::pair<std::vector<int>, double>>& groups) {
  BlochCoeffs c;
  c.x[0] = 0.25;
  for (const auto& [idx, v] : groups)
    for (int k : idx) c.x[static_cast<std::size_t>(k - 1)] = v;
  return c;
}

}  // namespace

BlochCoeffs BlochCoeffs::from_tail(std::span<const double> tail) {
  if (tail.size() != static_cast<std::size_t>(kTail))
    throw InvalidInput("BlochCoeffs: expected 15 free coefficients");
  BlochCoeffs c;
  c.x[0] = 0.25;
  std::copy(tail.begin(), tail.end(), c.x.begin() + 1);
  return c;
}

std::array<double, kBloch - 1> BlochCoeffs::tail() const {
  std::array<double, kBloch - 1> t{};
  std::copy(x.begin() + 1, x.end(), t.begin());
  return t;
}

BipartiteOperator bloch_state(const BlochCoeffs& c) {
  static const std::vector<CMatrix> terms = bloch_terms();
  if (std::fabs(c.x[0] - 0.25) > 1e-15) throw InvalidInput("bloch_state: x_1 must be 1/4");
  CMatrix m(16, 16);
  for (std::size_t k = 0; k < kBloch; ++k)
    if (c.x[k] != 0.0) m += terms[k] * cplx(c.x[k]);
  return {4, 4, std::move(m)};
}

const SignStructure& sign_structure() {
  static const SignStructure s = derive_sign_structure();
  return s;
}

std::array<double, kBloch> bloch_eigenvalues(const BlochCoeffs& c) { return linear_spectrum(c.x, false); }

std::array<double, kBloch> bloch_pt_eigenvalues(const BlochCoeffs& c) { return linear_spectrum(c.x, true); }

criteria::RadiusReport bloch_radius(const BlochCoeffs& c) {
  const auto ev = bloch_eigenvalues(c);
  const auto pt = bloch_pt_eigenvalues(c);
  double l1 = 0.0;
  for (double v : c.x) l1 += std::fabs(v);
  return criteria::make_radius_report(16, *std::min_element(ev.begin(), ev.end()),
                                      *std::min_element(pt.begin(), pt.end()), l1);
}

int bloch_rank(const BlochCoeffs& c, double cutoff) {
  const auto ev = bloch_eigenvalues(c);
  return static_cast<int>(std::count_if(ev.begin(), ev.end(), [&](double v) { return v > cutoff; }));
}

SymmetricOptimum optimize_ququart_symmetric() {
  // r_a = sqrt(16/15)(1/16 - 3s/4) and r_b = (15 s - 3/4)/4 are affine in s;
  // they cross at s*.
  SymmetricOptimum out;
  out.s_star = (4.0 + 3.0 * kSqrt15) / (4.0 + 5.0 * kSqrt15) / 12.0;
  out.r_star = (15.0 * out.s_star - 0.75) / 4.0;
  const std::vector<int> plus{2, 3, 4, 5, 6, 7, 9, 10, 12, 14};
  out.example.x[0] = 0.25;
  for (int k = 2; k <= kBloch; ++k) {
    const bool pos = std::find(plus.begin(), plus.end(), k) != plus.end();
    out.example.x[static_cast<std::size_t>(k - 1)] = pos ? out.s_star : -out.s_star;
  }
  return out;
}

BlochCoeffs rank10_example(bool snapped) {
  const BlochCoeffs c = from_one_based({{{2, 3, 4, 5, 6, 9, 12, 14, 16}, -0.0557066},
                         {{7, 11, 13}, 0.0142664},
                         {{8, 10, 15}, 0.0971467}});
  return snapped ? snap_to_vertex(c) : c;
}

BlochCoeffs rank9_example() {
  return from_one_based({{{2, 5}, 0.0999184},
                         {{3, 4, 6, 10, 14}, 0.0750408},
                         {{7, 9}, 0.0501632},
                         {{8, 13}, -0.0252856},
                         {{11, 15, 16}, -0.0501632},
                         {{12}, 0.0252856}});
}

BlochCoeffs snap_to_vertex(const BlochCoeffs& approx, double tol) {
  std::uint32_t orthant = 0;
  for (int k = 0; k < kTail; ++k)
    if (approx.x[static_cast<std::size_t>(k + 1)] < 0.0) orthant |= 1u << k;
  const auto rep = bloch_radius(approx);
  std::vector<double> point(approx.x.begin() + 1, approx.x.end());
  point.push_back(std::max(0.0, std::min(rep.r_a, rep.r_b)));
  const auto v = polytope::polish_vertex(orthant_lp(orthant), point, tol);
  if (v.flagged) {
    std::ostringstream msg;
    msg << "snap_to_vertex: " << v.active << " tight constraints of rank " << v.active_rank
        << " do not determine a vertex";
    throw NumericalError(msg.str());
  }
  return BlochCoeffs::from_tail(std::span<const double>(v.point).first(kTail));
}

polytope::LinearProgram orthant_lp(std::uint32_t orthant) {
  if (orthant >= kOrthants) throw InvalidInput("orthant_lp: orthant index out of range");
  const auto& s = sign_structure();
  polytope::LinearProgram lp;
  lp.objective.assign(kBloch, 0.0);
  lp.objective[kTail] = 1.0;
  // rho >= 0:  M x >= -1/4
  for (std::size_t j = 0; j < kBloch; ++j) {
    polytope::Constraint c{std::vector<double>(kBloch, 0.0), -0.25};
    for (std::size_t k = 0; k < static_cast<std::size_t>(kTail); ++k) c.coefficients[k] = s.M[j][k];
    lp.constraints.push_back(std::move(c));
  }
  // lambda_min(Gamma) >= sqrt(15) r / 4:  (M D) x - sqrt(15) r >= -1/4
  for (std::size_t j = 0; j < kBloch; ++j) {
    polytope::Constraint c{std::vector<double>(kBloch, 0.0), -0.25};
    for (std::size_t k = 0; k < static_cast<std::size_t>(kTail); ++k) c.coefficients[k] = s.M[j][k] * s.D[k];
    c.coefficients[kTail] = -kSqrt15;
    lp.constraints.push_back(std::move(c));
  }
  // sum sigma_k x_k - 4 r >= 3/4; sigma.x <= sum |x_k| makes this a
  // restriction of the CCNR constraint, exact on the orthant itself.
  {
    polytope::Constraint c{std::vector<double>(kBloch, 0.0), 0.75};
    for (std::size_t k = 0; k < static_cast<std::size_t>(kTail); ++k)
      c.coefficients[k] = (orthant >> k) & 1u ? -1.0 : 1.0;
    c.coefficients[kTail] = -4.0;
    lp.constraints.push_back(std::move(c));
  }
  {
    polytope::Constraint c{std::vector<double>(kBloch, 0.0), 0.0};
    c.coefficients[kTail] = 1.0;
    lp.constraints.push_back(std::move(c));
  }
  return lp;
}

OptimumReport optimize_ququart_lp(LpMode mode, const LpSweepOptions& opt) {
  sign_structure();  // derive once before the workers start
  OptimumReport rep;
  rep.mode = mode;
  rep.options = opt;
  rep.orthants = kOrthants;

  std::vector<polytope::LpResult> res(kOrthants);
  std::atomic<std::uint32_t> done{0};
  std::mutex progress_mutex;
  auto tick = [&] {
    const auto d = ++done;
    if (opt.progress && (d % 1024 == 0 || d == kOrthants)) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      opt.progress(d, kOrthants);
    }
  };
  parallel_for(
      kOrthants,
      [&](std::size_t o) {
        res[o] = polytope::lp_maximize(orthant_lp(static_cast<std::uint32_t>(o)));
        tick();
      },
      opt.workers);

  bool found = false;
  for (std::uint32_t o = 0; o < kOrthants; ++o) {
    rep.pivots += res[o].pivots;
    if (res[o].status == polytope::LpStatus::unbounded)
      throw NumericalError("optimize_ququart_lp: orthant LP reported unbounded");
    if (res[o].status == polytope::LpStatus::infeasible) {
      ++rep.infeasible_orthants;
      continue;
    }
    if (!found || res[o].value > rep.r_star) {
      rep.r_star = res[o].value;
      rep.maximizer_orthant = o;
      found = true;
    }
  }
  if (!found) throw NumericalError("optimize_ququart_lp: every orthant LP is infeasible");
  rep.maximizer = BlochCoeffs::from_tail(std::span<const double>(res[rep.maximizer_orthant].point).first(kTail));

  std::vector<std::uint32_t> positive, optimal;
  for (std::uint32_t o = 0; o < kOrthants; ++o) {
    if (res[o].status != polytope::LpStatus::optimal) continue;
    if (res[o].value > opt.positive_tol) positive.push_back(o);
    if (res[o].value >= rep.r_star - opt.optimal_tol) optimal.push_back(o);
  }
  rep.positive_orthants = static_cast<std::uint32_t>(positive.size());
  rep.optimal_orthants = static_cast<std::uint32_t>(optimal.size());
  if (mode == LpMode::max_only) return rep;

  polytope::EnumerationOptions eo;
  eo.dedup_tol = opt.dedup_tol;

  // Full vertex sets of every orthant polytope with a positive optimum.
  std::vector<std::vector<polytope::Vertex>> per(positive.size());
  done = 0;
  parallel_for(
      positive.size(),
      [&](std::size_t i) {
        auto verts = polytope::enumerate_vertices(orthant_lp(positive[i]), eo);
        std::vector<polytope::Vertex> keep;
        for (auto& v : verts)
          if (v.point[kTail] > opt.positive_tol) keep.push_back(std::move(v));
        per[i] = std::move(keep);
        if (opt.progress) {
          const auto d = ++done;
          if (d % 256 == 0 || d == positive.size()) {
            std::lock_guard<std::mutex> lock(progress_mutex);
            opt.progress(d, static_cast<std::uint32_t>(positive.size()));
          }
        }
      },
      opt.workers);

  // A state can be a vertex of several orthant polytopes with different r;
  // classes are formed on x alone and keep the largest r.
  std::vector<std::vector<double>> xs;
  std::vector<double> rs;
  for (auto& list : per)
    for (auto& v : list) {
      if (v.flagged) ++rep.flagged_vertices;
      rs.push_back(v.point[kTail]);
      v.point.pop_back();
      xs.push_back(std::move(v.point));
    }
  per.clear();
  const auto label = polytope::equivalence_classes(xs, opt.dedup_tol);
  std::size_t classes = 0;
  for (std::size_t l : label) classes = std::max(classes, l + 1);
  std::vector<std::size_t> rep_idx(classes, xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::size_t& r = rep_idx[label[i]];
    if (r == xs.size() || rs[i] > rs[r] || (rs[i] == rs[r] && xs[i] < xs[r])) r = i;
  }
  std::vector<std::vector<double>> pos_pts;
  for (std::size_t i : rep_idx) {
    std::vector<double> p = xs[i];
    p.push_back(rs[i]);
    pos_pts.push_back(std::move(p));
  }
  xs.clear();
  rep.positive_vertex_count = pos_pts.size();

  auto make_vertex = [&](const std::vector<double>& p) {
    CensusVertex cv;
    cv.x = BlochCoeffs::from_tail(std::span<const double>(p).first(kTail));
    cv.r = p[kTail];
    cv.radius = bloch_radius(cv.x).r;
    cv.rank = bloch_rank(cv.x, opt.rank_cutoff);
    return cv;
  };

  rep.min_rank_positive = kBloch + 1;
  for (const auto& p : pos_pts) {
    const CensusVertex cv = make_vertex(p);
    ++rep.positive_rank_histogram[cv.rank];
    auto [it, inserted] = rep.positive_rank_max_r.emplace(cv.rank, cv.r);
    if (!inserted) it->second = std::max(it->second, cv.r);
    if (cv.rank < rep.min_rank_positive ||
        (cv.rank == rep.min_rank_positive && cv.r > rep.min_rank_positive_example.r)) {
      rep.min_rank_positive = cv.rank;
      rep.min_rank_positive_example = cv;
    }
    if (cv.r >= rep.r_star - opt.optimal_tol) rep.optimal_vertices.push_back(cv);
  }
  rep.min_rank_optimal = kBloch + 1;
  for (const auto& cv : rep.optimal_vertices) {
    ++rep.optimal_rank_histogram[cv.rank];
    rep.min_rank_optimal = std::min(rep.min_rank_optimal, cv.rank);
  }

  // Cross-check: vertices of the optimal faces of the optimal orthants only.
  std::vector<std::vector<polytope::Vertex>> faces(optimal.size());
  parallel_for(
      optimal.size(),
      [&](std::size_t i) {
        faces[i] = polytope::optimal_face_vertices(orthant_lp(optimal[i]), res[optimal[i]].value,
                                                   opt.optimal_tol, eo);
      },
      opt.workers);
  std::vector<std::vector<double>> face_pts;
  for (auto& list : faces)
    for (auto& v : list)
      if (v.point[kTail] >= rep.r_star - opt.optimal_tol) {
        v.point.pop_back();
        face_pts.push_back(std::move(v.point));
      }
  rep.optimal_face_vertex_count = polytope::deduplicate(std::move(face_pts), opt.dedup_tol).size();
  return rep;
}

int state_rank(const BipartiteOperator& rho, double cutoff) { return qmat::rank(rho.entries(), cutoff); }

}  // namespace bentcert::families
