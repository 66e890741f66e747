#pragma once

// The qubit, M_2(C): trace-1 projectors are P = (I + a.sigma)/2 for unit
// Bloch vectors a, and a and -a generate the same context.

#include <array>
#include <cmath>
#include <string>

#include "ctxq/born.hpp"
#include "ctxq/context.hpp"
#include "ctxq/linalg.hpp"

namespace ctxq {

inline constexpr double kBlochUnitTolerance = 1e-12;

class BlochVector {
public:
    BlochVector(double x, double y, double z) : v_{x, y, z} {
        const double norm2 = x * x + y * y + z * z;
        if (!(std::abs(norm2 - 1.0) <= kBlochUnitTolerance)) {
            throw Error(ErrorKind::NotUnit, "|a|^2 = " + std::to_string(norm2));
        }
    }

    /// Rescales (x, y, z) to unit length when its norm is within `slack` of 1.
    static BlochVector normalized(double x, double y, double z, double slack = 1e-6) {
        const double norm = std::sqrt(x * x + y * y + z * z);
        if (!(std::abs(norm - 1.0) <= slack)) throw Error(ErrorKind::NotUnit, "|a| = " + std::to_string(norm));
        return BlochVector(x / norm, y / norm, z / norm);
    }

    double x() const noexcept { return v_[0]; }
    double y() const noexcept { return v_[1]; }
    double z() const noexcept { return v_[2]; }
    const std::array<double, 3> &components() const noexcept { return v_; }

    BlochVector operator-() const { return BlochVector(-v_[0], -v_[1], -v_[2]); }
    double dot(const BlochVector &o) const { return v_[0] * o.v_[0] + v_[1] * o.v_[1] + v_[2] * o.v_[2]; }

private:
    std::array<double, 3> v_;
};

/// a_x sigma_x + a_y sigma_y + a_z sigma_z, a self-adjoint unitary of trace 0.
inline CMatrix bloch_unitary(const BlochVector &a) {
    return pauli_x() * Complex{a.x()} + pauli_y() * Complex{a.y()} + pauli_z() * Complex{a.z()};
}

inline CMatrix bloch_to_projector(const BlochVector &a) {
    return (CMatrix::identity(2) + bloch_unitary(a)) * Complex{0.5};
}

/// a_k = Re Tr(P sigma_k), renormalized onto the sphere.
inline BlochVector projector_to_bloch(const CMatrix &p, const Tolerance &tol = {}) {
    if (p.n() != 2 || !is_projector(p, tol) || !(std::abs(trace(p).real() - 1.0) < tol.eps())) {
        throw Error(ErrorKind::NotTraceOneProjector, "expected a 2x2 projector of trace 1");
    }
    return BlochVector::normalized(trace(p * pauli_x()).real(), trace(p * pauli_y()).real(),
                                   trace(p * pauli_z()).real(), tol.eps());
}

inline Context qubit_context(const BlochVector &a, const Tolerance &tol = {}) {
    return make_context(validate_system({bloch_to_projector(a), bloch_to_projector(-a)}, tol), tol);
}

/// Closed-form Born table for qubit_context(a) x qubit_context(b): entries
/// (1 + s t a.b)/2, where s (t) is +1 when the canonical projector in that
/// row (column) is P_a (P_b) and -1 when it is P_-a (P_-b).
inline std::array<std::array<double, 2>, 2> qubit_born_closed_form(const BlochVector &a, const BlochVector &b,
                                                                   const Tolerance &tol = {}) {
    auto signs = [&tol](const BlochVector &v) {
        const Context c = qubit_context(v, tol);
        const CMatrix pv = bloch_to_projector(v);
        std::array<double, 2> s{};
        for (std::size_t i = 0; i < 2; ++i) s[i] = frobenius_norm(c.system[i] - pv) < 0.5 ? 1.0 : -1.0;
        return s;
    };
    const auto s = signs(a);
    const auto t = signs(b);
    const double ab = a.dot(b);
    std::array<std::array<double, 2>, 2> out{};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) out[i][j] = 0.5 * (1.0 + s[i] * t[j] * ab);
    return out;
}

}  // namespace ctxq
