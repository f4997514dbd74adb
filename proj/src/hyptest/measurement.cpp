#include <cmath>
#include <numbers>
#include <sstream>

#include "bentcert/error.hpp"
#include "bentcert/hyptest.hpp"

namespace bentcert::hyptest {

namespace {

CMatrix projector(const std::vector<cplx>& v) { return outer(v, v); }

std::vector<cplx> kron_vec(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  std::vector<cplx> out;
  out.reserve(a.size() * b.size());
  for (const cplx& x : a)
    for (const cplx& y : b) out.push_back(x * y);
  return out;
}

std::vector<cplx> row_of(const CMatrix& m, std::size_t r) {
  auto s = m.row(r);
  return {s.begin(), s.end()};
}

// Local measurement: basis vectors plus a label.
struct LocalBasis {
  std::string label;
  std::vector<std::vector<cplx>> vectors;
};

MeasurementModel product_model(std::string name, int dA, int dB, const std::vector<LocalBasis>& a,
                               const std::vector<LocalBasis>& b) {
  MeasurementModel model;
  model.name = std::move(name);
  model.dA = dA;
  model.dB = dB;
  for (const auto& la : a)
    for (const auto& lb : b) {
      Setting s;
      s.label = la.label + "|" + lb.label;
      for (const auto& u : la.vectors)
        for (const auto& v : lb.vectors) s.effects.push_back(projector(kron_vec(u, v)));
      model.settings.push_back(std::move(s));
    }
  return model;
}

// Coordinates of a Hermitian operator in the Gell-Mann basis of its dimension.
std::vector<double> hermitian_coordinates(const std::vector<CMatrix>& basis, const CMatrix& e) {
  std::vector<double> c(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) c[k] = hs_inner(basis[k], e).real();
  return c;
}

}  // namespace

std::size_t MeasurementModel::outcomes() const {
  std::size_t n = 0;
  for (const auto& s : settings) n += s.effects.size();
  return n;
}

int MeasurementModel::reduced_dimension() const {
  int m = 0;
  for (const auto& s : settings) m += static_cast<int>(s.effects.size()) - 1;
  return m;
}

void validate(const MeasurementModel& model) {
  const auto d = static_cast<std::size_t>(model.dim());
  if (model.settings.empty()) throw InvalidInput("measurement model has no settings");
  for (const auto& s : model.settings) {
    if (s.effects.size() < 2) throw InvalidInput("setting " + s.label + " has fewer than two outcomes");
    CMatrix sum(d, d);
    for (std::size_t k = 0; k < s.effects.size(); ++k) {
      const CMatrix& e = s.effects[k];
      if (e.rows() != d || e.cols() != d)
        throw InvalidInput("setting " + s.label + ": effect has the wrong shape");
      if (!qmat::is_hermitian(e)) throw InvalidInput("setting " + s.label + ": effect is not Hermitian");
      if (qmat::min_eigenvalue(e) < -1e-12)
        throw InvalidInput("setting " + s.label + ": effect is not positive semidefinite");
      sum += e;
    }
    const double dev = hs_norm(sum - CMatrix::identity(d));
    if (dev > 1e-12) {
      std::ostringstream msg;
      msg << "setting " << s.label << ": effects sum to the identity only within " << dev;
      throw InvalidInput(msg.str());
    }
  }
}

int span_rank(const MeasurementModel& model) {
  const int d = model.dim();
  const auto basis = qmat::operator_basis(d, qmat::BasisKind::gellmann).elements;
  const std::size_t n = basis.size();
  RMatrix gram(n, n);
  for (const auto& s : model.settings)
    for (const auto& e : s.effects) {
      const auto c = hermitian_coordinates(basis, e);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) gram(i, j) += c[i] * c[j];
    }
  const auto ev = qmat::eigenvalues(gram);
  const double cut = 1e-9 * std::max(1.0, ev.back());
  int r = 0;
  for (double v : ev)
    if (v > cut) ++r;
  return r;
}

std::array<CMatrix, 4> qutrit_mubs() {
  const cplx w = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  const cplx w2 = w * w;
  const cplx one = 1.0;
  const double s = 1.0 / std::sqrt(3.0);
  auto make = [&](std::array<cplx, 9> e) {
    CMatrix m(3, 3);
    for (std::size_t i = 0; i < 9; ++i) m(i / 3, i % 3) = e[i] * s;
    return m;
  };
  return {CMatrix::identity(3), make({one, one, one, one, w2, w, one, w, w2}),
          make({one, one, w, one, w2, w2, one, w, one}), make({one, one, w2, one, w2, one, one, w, w})};
}

MeasurementModel mub_model_qutrit() {
  const auto mubs = qutrit_mubs();
  std::vector<LocalBasis> local;
  for (std::size_t l = 0; l < mubs.size(); ++l) {
    LocalBasis b{"M" + std::to_string(l), {}};
    for (std::size_t r = 0; r < 3; ++r) b.vectors.push_back(row_of(mubs[l], r));
    local.push_back(std::move(b));
  }
  return product_model("qutrit-mub", 3, 3, local, local);
}

MeasurementModel pauli_pair_model_ququart() {
  const double h = 1.0 / std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  // Eigenvectors of sigma_1..3, eigenvalue +1 first.
  const std::array<std::array<std::vector<cplx>, 2>, 3> eig{{
      {{{h, h}, {h, -h}}},
      {{{h, i * h}, {h, -i * h}}},
      {{{1.0, 0.0}, {0.0, 1.0}}},
  }};
  const char* name = "XYZ";
  std::vector<LocalBasis> local;
  for (int mu = 0; mu < 3; ++mu)
    for (int nu = 0; nu < 3; ++nu) {
      LocalBasis b{std::string(1, name[mu]) + name[nu], {}};
      for (const auto& u : eig[static_cast<std::size_t>(mu)])
        for (const auto& v : eig[static_cast<std::size_t>(nu)]) b.vectors.push_back(kron_vec(u, v));
      local.push_back(std::move(b));
    }
  return product_model("ququart-pauli-pairs", 4, 4, local, local);
}

Table probability_map(const MeasurementModel& model, const BipartiteOperator& rho) {
  if (rho.dim() != model.dim()) throw InvalidInput("probability_map: state dimension does not match the model");
  Table t;
  t.reserve(model.settings.size());
  for (const auto& s : model.settings) {
    std::vector<double> p;
    p.reserve(s.effects.size());
    for (const auto& e : s.effects) {
      const double v = hs_inner(e, rho.entries()).real();
      p.push_back(v < 0.0 && v > -1e-12 ? 0.0 : v);  // clip rounding noise only
    }
    t.push_back(std::move(p));
  }
  return t;
}

}  // namespace bentcert::hyptest
