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

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qexpect {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Tolerances shared across modules.
inline constexpr double kInvariantTol = 1e-10;
inline constexpr double kInputTol = 1e-8;

// Normalized pure belief state. Two states are equal when they describe the
// same ray, i.e. they differ only by a global phase.
class StateVector {
 public:
  // Normalizes the input. Throws InvalidInput for d < 2 or a zero vector.
  explicit StateVector(CVector amplitudes);
  StateVector(std::initializer_list<Complex> amplitudes);
  explicit StateVector(std::span<const Complex> amplitudes);
  static StateVector from_amplitudes(std::span<const Complex> amplitudes);

  // e_k of the standard basis.
  static StateVector basis(std::size_t dim, std::size_t k);

  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const CVector& amplitudes() const { return amps_; }
  Complex operator[](std::size_t k) const { return amps_(static_cast<Eigen::Index>(k)); }
  std::vector<Complex> to_vector() const;

  // |<this|other>|^2 > 1 - tol.
  bool same_ray(const StateVector& other, double tol = kInvariantTol) const;

  // Multiplies by e^{i phase}; the result describes the same ray.
  StateVector with_global_phase(double phase) const;

 private:
  CVector amps_;
};

// <a|b>, antilinear in the first argument.
Complex inner_product(const StateVector& a, const StateVector& b);

class Projector {
 public:
  // Validates idempotence and hermiticity within kInputTol.
  explicit Projector(CMatrix matrix);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  // Trace of the projector, rounded; equals the multiplicity of the eigenspace.
  std::size_t rank() const;

  // |e><e|
  static Projector onto(const StateVector& e);

 private:
  CMatrix m_;
};

// Distinct eigenvalue together with the eigenvectors spanning its eigenspace.
struct OutcomeGroup {
  double value;
  std::vector<std::size_t> members;
};

// Hermitian observable given in spectral form. Outcomes (distinct eigenvalues)
// are ordered by descending value, so the price observable lists +1 first.
class Observable {
 public:
  std::size_t dim() const { return eigenvectors_.size(); }
  const std::vector<StateVector>& eigenvectors() const { return eigenvectors_; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  const std::vector<OutcomeGroup>& outcomes() const { return groups_; }
  std::vector<double> outcome_values() const;
  const std::string& name() const { return name_; }

  // Sum_k lambda_k |e_k><e_k|.
  const CMatrix& matrix() const { return matrix_; }

  // Index into outcomes() for the given value, or throws InvalidInput.
  std::size_t outcome_index(double value) const;

  Observable renamed(std::string name) const;

 private:
  friend Observable make_observable(std::vector<StateVector>, std::vector<double>, std::string);
  Observable() = default;

  std::vector<StateVector> eigenvectors_;
  std::vector<double> eigenvalues_;
  std::vector<OutcomeGroup> groups_;
  CMatrix matrix_;
  std::string name_;
};

// Eigenvalues are grouped when they agree within 1e-12. Throws InvalidInput if
// the Gram matrix deviates from identity by more than kInputTol, or when the
// counts do not match the dimension.
Observable make_observable(std::vector<StateVector> eigenvectors, std::vector<double> eigenvalues,
                           std::string name = {});

// P = |+><+| - |-><-| in the standard basis of C^2.
Observable price_observable(std::string name = "P");

// Two-level observable with eigenvectors (cos t, e^{i phi} sin t) for +1 and
// (-sin t, e^{i phi} cos t) for -1. theta = 0 gives price_observable().
Observable rotated_observable(double theta, double phase = 0.0, std::string name = {});

// Lüders eigenspace projector. Throws InvalidInput for an unknown outcome.
Projector projector_for(const Observable& obs, double outcome);

// Hermitian generator of e^{-iHt} (hbar = 1). The spectral decomposition is
// computed once at construction.
class Hamiltonian {
 public:
  // Throws InvalidInput if the matrix is not square, d < 2, or not Hermitian
  // within kInputTol.
  explicit Hamiltonian(CMatrix matrix);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  const Eigen::VectorXd& energies() const { return energies_; }
  const CMatrix& eigenbasis() const { return basis_; }
  bool is_zero() const { return zero_; }

  // e^{-iHt} via the spectral decomposition.
  CMatrix propagator(double t) const;

  static Hamiltonian zero(std::size_t dim);
  // omega (|0><1| + |1><0|): Rabi coupling between price-up and price-down.
  static Hamiltonian rabi(double omega);
  // x sigma_x + y sigma_y + z sigma_z.
  static Hamiltonian pauli(double x, double y, double z);

 private:
  CMatrix m_;
  Eigen::VectorXd energies_;
  CMatrix basis_;
  bool zero_ = false;
};

// psi(t) = e^{-iHt} psi. Negative t evolves backwards.
StateVector evolve(const StateVector& psi, const Hamiltonian& h, double t);

// Frobenius norm ||AB - BA||_F of the reconstructed operators, unnormalized.
// For sigma_z and sigma_x this is ||2i sigma_y||_F = 2 sqrt(2).
double commutator_norm(const Observable& a, const Observable& b);

bool is_hermitian(const CMatrix& m, double tol);

}  // namespace qexpect
