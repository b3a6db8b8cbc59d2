#include "mrb/unitary.hpp"

#include <cmath>

#include "mrb/errors.hpp"

namespace mrb {

using std::complex;
static const complex<double> I1(0.0, 1.0);

Mat2 pauli_letter_matrix(PauliLetter p) {
    Mat2 m;
    switch (p) {
        case PauliLetter::I: m << 1, 0, 0, 1; break;
        case PauliLetter::X: m << 0, 1, 1, 0; break;
        case PauliLetter::Y: m << 0, -I1, I1, 0; break;
        case PauliLetter::Z: m << 1, 0, 0, -1; break;
    }
    return m;
}

Mat pauli_matrix(const PauliString& p) {
    int n = p.n();
    int dim = 1 << n;
    Mat m = Mat::Zero(dim, dim);
    static const complex<double> phases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (int c = 0; c < dim; ++c) {
        int r = c;
        complex<double> amp = phases[p.phase_exp];
        for (int q = 0; q < n; ++q) {
            int bit = (c >> q) & 1;
            switch (p.letters[q]) {
                case PauliLetter::I: break;
                case PauliLetter::X: r ^= (1 << q); break;
                case PauliLetter::Y:
                    r ^= (1 << q);
                    amp *= bit ? -I1 : I1;  // Y|0> = i|1>, Y|1> = -i|0>
                    break;
                case PauliLetter::Z:
                    if (bit) amp = -amp;
                    break;
            }
        }
        m(r, c) = amp;
    }
    return m;
}

Mat2 rot_x(double t) {
    double c = std::cos(t / 2), s = std::sin(t / 2);
    Mat2 m;
    m << c, -I1 * s, -I1 * s, c;
    return m;
}

Mat2 rot_z(double t) {
    Mat2 m;
    m << std::exp(-I1 * (t / 2)), 0, 0, std::exp(I1 * (t / 2));
    return m;
}

Mat2 rot_axis(PauliLetter p, double t) {
    if (p == PauliLetter::I) return Mat2::Identity();
    double c = std::cos(t / 2), s = std::sin(t / 2);
    return c * Mat2::Identity() - I1 * s * pauli_letter_matrix(p);
}

Mat2 u3_matrix(double theta, double phi, double lambda) {
    return rot_z(-phi - M_PI / 2) * rot_x(M_PI / 2) * rot_z(M_PI - 2 * theta) *
           rot_x(M_PI / 2) * rot_z(-lambda + M_PI / 2);
}

U3Angles u3_angles_from_unitary(const Mat2& v_in) {
    Mat2 v = v_in;
    complex<double> det = v.determinant();
    v /= std::sqrt(det);  // special-unitarize; residual sign is a global phase

    // Write v = e^{ia} [[cos(T/2), -e^{iL} sin(T/2)], [e^{iP} sin(T/2), e^{i(P+L)} cos(T/2)]].
    double cmag = std::abs(v(0, 0)), smag = std::abs(v(1, 0));
    double T = 2.0 * std::atan2(smag, cmag);
    double P = 0, L = 0;
    const double eps = 1e-12;
    if (smag < eps) {
        P = std::arg(v(1, 1) / v(0, 0));
        L = 0;
    } else if (cmag < eps) {
        L = 0;
        P = std::arg(v(1, 0) / (-v(0, 1)));
    } else {
        double a = std::arg(v(0, 0));
        P = std::arg(v(1, 0)) - a;
        L = std::arg(-v(0, 1)) - a;
    }
    // Map the standard parameters to the five-gate parameters.
    return U3Angles{T / 2, -P - M_PI / 2, -L - M_PI / 2};
}

Mat gate_unitary(const Gate& g) {
    switch (g.kind) {
        case GateKind::Idle: return Mat2::Identity();
        case GateKind::XHalfPi: return rot_x(M_PI / 2);
        case GateKind::ZRot: return rot_z(g.params[0]);
        case GateKind::U3: return u3_matrix(g.params[0], g.params[1], g.params[2]);
        case GateKind::PauliAxisRot: return rot_axis(g.axis, g.params[0]);
        case GateKind::CPRot: {
            // local index = control_bit + 2 * target_bit
            Mat4 m = Mat4::Zero();
            Mat2 r = rot_axis(g.axis, g.params[0]);
            for (int t = 0; t < 2; ++t) m(0 + 2 * t, 0 + 2 * t) = 1.0;  // control = 0
            for (int t = 0; t < 2; ++t)
                for (int tp = 0; tp < 2; ++tp) m(1 + 2 * tp, 1 + 2 * t) = r(tp, t);
            return m;
        }
    }
    throw UserError("gate_unitary: unknown kind");
}

Mat embed_unitary(const Mat& u, const std::vector<int>& qubits, int n) {
    int k = static_cast<int>(qubits.size());
    int dim = 1 << n, ldim = 1 << k;
    Mat out = Mat::Zero(dim, dim);
    int mask = 0;
    for (int q : qubits) mask |= 1 << q;
    for (int c = 0; c < dim; ++c) {
        int lc = 0;
        for (int i = 0; i < k; ++i) lc |= ((c >> qubits[i]) & 1) << i;
        int rest = c & ~mask;
        for (int lr = 0; lr < ldim; ++lr) {
            if (u(lr, lc) == complex<double>(0, 0)) continue;
            int r = rest;
            for (int i = 0; i < k; ++i)
                if ((lr >> i) & 1) r |= 1 << qubits[i];
            out(r, c) = u(lr, lc);
        }
    }
    return out;
}

Mat layer_unitary(const Layer& l) {
    if (l.n > kDenseCap) throw CapacityError("layer_unitary: n exceeds dense cap");
    int dim = 1 << l.n;
    Mat out = Mat::Identity(dim, dim);
    for (const auto& g : l.gates) {
        if (g.kind == GateKind::Idle) continue;
        out = embed_unitary(gate_unitary(g), g.qubits, l.n) * out;
    }
    return out;
}

Mat circuit_unitary(const Circuit& c) {
    if (c.n > kDenseCap) throw CapacityError("circuit_unitary: n exceeds dense cap");
    int dim = 1 << c.n;
    Mat out = Mat::Identity(dim, dim);
    for (const auto& l : c.layers) out = layer_unitary(l) * out;
    return out;
}

bool equal_up_to_phase(const Mat& a, const Mat& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    // find the largest entry of b to anchor the phase
    Eigen::Index r = 0, cidx = 0;
    b.cwiseAbs().maxCoeff(&r, &cidx);
    if (std::abs(b(r, cidx)) < tol) return a.cwiseAbs().maxCoeff() < tol;
    complex<double> phase = a(r, cidx) / b(r, cidx);
    double m = std::abs(phase);
    if (std::abs(m - 1.0) > tol) return false;
    return (a - phase * b).cwiseAbs().maxCoeff() < tol;
}

}  // namespace mrb
