#pragma once
// Dense unitaries for gates, layers and circuits, plus the single-qubit
// five-gate decomposition
//
//   u(theta,phi,lambda) = z(-phi-pi/2) x(pi/2) z(pi-2 theta) x(pi/2) z(-lambda+pi/2)
//
// with z(t)=exp(-i t Z/2), x(t)=exp(-i t X/2) (leftmost factor acts last).
// All circuit-level equality is modulo global phase.

#include <complex>
#include <Eigen/Dense>

#include "mrb/circuit.hpp"
#include "mrb/pauli.hpp"

namespace mrb {

using Mat = Eigen::MatrixXcd;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

inline constexpr int kDenseCap = 6;  // max n for 2^n x 2^n matrices

Mat2 pauli_letter_matrix(PauliLetter p);
Mat pauli_matrix(const PauliString& p);  // includes the i^k phase

Mat2 rot_x(double theta);  // exp(-i theta X / 2)
Mat2 rot_z(double theta);
Mat2 rot_axis(PauliLetter p, double theta);
Mat2 u3_matrix(double theta, double phi, double lambda);  // the five-gate product

// Angles (theta, phi, lambda) whose five-gate product equals v up to phase.
struct U3Angles {
    double theta, phi, lambda;
};
U3Angles u3_angles_from_unitary(const Mat2& v);

Mat gate_unitary(const Gate& g);               // 2x2 or 4x4 on the gate's own qubits
Mat layer_unitary(const Layer& l);             // 2^n x 2^n
Mat circuit_unitary(const Circuit& c);         // product, last layer leftmost
Mat embed_unitary(const Mat& u, const std::vector<int>& qubits, int n);

bool equal_up_to_phase(const Mat& a, const Mat& b, double tol = 1e-10);

}  // namespace mrb
