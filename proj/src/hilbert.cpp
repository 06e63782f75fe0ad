// Copyright 2026 The qexpect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qexpect/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "qexpect/error.hpp"

namespace qexpect {
namespace {

constexpr double kRenormSkip = 1e-14;
constexpr double kDegeneracyTol = 1e-12;

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InvalidInput(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                       std::to_string(b) + ")");
  }
}

CVector normalized(CVector v) {
  if (v.size() < 2) throw InvalidInput("state dimension must be at least 2");
  const double n2 = v.squaredNorm();
  if (!std::isfinite(n2) || n2 <= 0.0) throw InvalidInput("state vector has zero or non-finite norm");
  // Already-normalized input is kept bit-for-bit.
  if (std::abs(n2 - 1.0) > kRenormSkip) v /= std::sqrt(n2);
  return v;
}

}  // namespace

StateVector::StateVector(CVector amplitudes) : amps_(normalized(std::move(amplitudes))) {}

StateVector::StateVector(std::initializer_list<Complex> amplitudes)
    : StateVector(std::span<const Complex>(amplitudes.begin(), amplitudes.size())) {}

StateVector::StateVector(std::span<const Complex> amplitudes)
    : StateVector(CVector(Eigen::Map<const CVector>(amplitudes.data(),
                                                    static_cast<Eigen::Index>(amplitudes.size())))) {}

StateVector StateVector::from_amplitudes(std::span<const Complex> amplitudes) {
  return StateVector(amplitudes);
}

StateVector StateVector::basis(std::size_t dim, std::size_t k) {
  if (k >= dim) throw InvalidInput("basis index out of range");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(k)) = 1.0;
  return StateVector(std::move(v));
}

std::vector<Complex> StateVector::to_vector() const {
  return {amps_.data(), amps_.data() + amps_.size()};
}

bool StateVector::same_ray(const StateVector& other, double tol) const {
  if (dim() != other.dim()) return false;
  return std::norm(inner_product(*this, other)) > 1.0 - tol;
}

StateVector StateVector::with_global_phase(double phase) const {
  return StateVector(CVector(amps_ * std::polar(1.0, phase)));
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  require_same_dim(a.dim(), b.dim(), "inner_product");
  return a.amplitudes().dot(b.amplitudes());
}

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Projector::Projector(CMatrix matrix) : m_(std::move(matrix)) {
  if (m_.rows() != m_.cols() || m_.rows() < 2) throw InvalidInput("projector must be square with d >= 2");
  if (!is_hermitian(m_, kInputTol)) throw InvalidInput("projector is not Hermitian");
  if ((m_ * m_ - m_).cwiseAbs().maxCoeff() > kInputTol) throw InvalidInput("projector is not idempotent");
}

std::size_t Projector::rank() const {
  return static_cast<std::size_t>(std::lround(m_.trace().real()));
}

Projector Projector::onto(const StateVector& e) {
  return Projector(e.amplitudes() * e.amplitudes().adjoint());
}

std::vector<double> Observable::outcome_values() const {
  std::vector<double> out;
  out.reserve(groups_.size());
  for (const auto& g : groups_) out.push_back(g.value);
  return out;
}

std::size_t Observable::outcome_index(double value) const {
  for (std::size_t k = 0; k < groups_.size(); ++k) {
    if (std::abs(groups_[k].value - value) <= kDegeneracyTol) return k;
  }
  throw InvalidInput("outcome " + std::to_string(value) + " is not an eigenvalue of observable '" +
                     name_ + "'");
}

Observable Observable::renamed(std::string name) const {
  Observable o = *this;
  o.name_ = std::move(name);
  return o;
}

Observable make_observable(std::vector<StateVector> eigenvectors, std::vector<double> eigenvalues,
                           std::string name) {
  const std::size_t d = eigenvectors.size();
  if (d < 2) throw InvalidInput("observable needs at least 2 eigenvectors");
  if (eigenvalues.size() != d) throw InvalidInput("observable needs one eigenvalue per eigenvector");
  for (const auto& v : eigenvectors) require_same_dim(v.dim(), d, "make_observable");
  for (double l : eigenvalues) {
    if (!std::isfinite(l)) throw InvalidInput("eigenvalue is not finite");
  }

  CMatrix basis(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < d; ++k) basis.col(static_cast<Eigen::Index>(k)) = eigenvectors[k].amplitudes();
  const CMatrix gram = basis.adjoint() * basis;
  const double dev = (gram - CMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (dev > kInputTol) {
    throw InvalidInput("eigenvectors are not orthonormal (Gram deviation " + std::to_string(dev) + ")");
  }

  Observable obs;
  std::vector<std::size_t> order(d);
  for (std::size_t k = 0; k < d; ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return eigenvalues[a] > eigenvalues[b]; });
  for (std::size_t k : order) {
    if (!obs.groups_.empty() && std::abs(obs.groups_.back().value - eigenvalues[k]) <= kDegeneracyTol) {
      obs.groups_.back().members.push_back(k);
    } else {
      obs.groups_.push_back({eigenvalues[k], {k}});
    }
  }
  const Eigen::VectorXd lambda =
      Eigen::Map<const Eigen::VectorXd>(eigenvalues.data(), static_cast<Eigen::Index>(d));
  obs.matrix_ = basis * lambda.cast<Complex>().asDiagonal() * basis.adjoint();
  obs.eigenvectors_ = std::move(eigenvectors);
  obs.eigenvalues_ = std::move(eigenvalues);
  obs.name_ = std::move(name);
  return obs;
}

Observable price_observable(std::string name) {
  return make_observable({StateVector::basis(2, 0), StateVector::basis(2, 1)}, {1.0, -1.0},
                         std::move(name));
}

Observable rotated_observable(double theta, double phase, std::string name) {
  const Complex e = std::polar(1.0, phase);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return make_observable({StateVector{Complex(c), e * s}, StateVector{Complex(-s), e * c}}, {1.0, -1.0},
                         std::move(name));
}

Projector projector_for(const Observable& obs, double outcome) {
  const auto& group = obs.outcomes()[obs.outcome_index(outcome)];
  const auto d = static_cast<Eigen::Index>(obs.dim());
  CMatrix m = CMatrix::Zero(d, d);
  for (std::size_t k : group.members) {
    const CVector& e = obs.eigenvectors()[k].amplitudes();
    m += e * e.adjoint();
  }
  return Projector(std::move(m));
}

Hamiltonian::Hamiltonian(CMatrix matrix) : m_(std::move(matrix)) {
  if (m_.rows() != m_.cols() || m_.rows() < 2) throw InvalidInput("Hamiltonian must be square with d >= 2");
  if (!m_.allFinite()) throw InvalidInput("Hamiltonian has non-finite entries");
  if (!is_hermitian(m_, kInputTol)) throw InvalidInput("Hamiltonian is not Hermitian");
  // Symmetrize away sub-tolerance skew before diagonalizing.
  const CMatrix herm = 0.5 * (m_ + m_.adjoint());
  zero_ = herm.cwiseAbs().maxCoeff() == 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm);
  energies_ = solver.eigenvalues();
  basis_ = solver.eigenvectors();
}

CMatrix Hamiltonian::propagator(double t) const {
  const auto d = static_cast<Eigen::Index>(dim());
  if (zero_ || t == 0.0) return CMatrix::Identity(d, d);
  Eigen::VectorXcd phases(d);
  for (Eigen::Index k = 0; k < d; ++k) phases(k) = std::polar(1.0, -energies_(k) * t);
  return basis_ * phases.asDiagonal() * basis_.adjoint();
}

Hamiltonian Hamiltonian::zero(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return Hamiltonian(CMatrix::Zero(d, d));
}

Hamiltonian Hamiltonian::rabi(double omega) { return pauli(omega, 0.0, 0.0); }

Hamiltonian Hamiltonian::pauli(double x, double y, double z) {
  CMatrix m(2, 2);
  m << Complex(z), Complex(x, -y), Complex(x, y), Complex(-z);
  return Hamiltonian(std::move(m));
}

StateVector evolve(const StateVector& psi, const Hamiltonian& h, double t) {
  require_same_dim(psi.dim(), h.dim(), "evolve");
  if (!std::isfinite(t)) throw InvalidInput("evolve: time must be finite");
  if (h.is_zero() || t == 0.0) return psi;
  return StateVector(CVector(h.propagator(t) * psi.amplitudes()));
}

double commutator_norm(const Observable& a, const Observable& b) {
  require_same_dim(a.dim(), b.dim(), "commutator_norm");
  return (a.matrix() * b.matrix() - b.matrix() * a.matrix()).norm();
}

}  // namespace qexpect
