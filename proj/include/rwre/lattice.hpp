#ifndef RWRE_LATTICE_HPP
#define RWRE_LATTICE_HPP

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "rwre/rng.hpp"

namespace rwre {

// Lattice points and jumps live on Z^d with a small fixed d per experiment.
using Lattice = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline std::int64_t dot(const Lattice& a, const Lattice& b) { return a.dot(b); }

inline std::int64_t l1_norm(const Lattice& z) { return z.cwiseAbs().sum(); }

inline Vec to_real(const Lattice& z) { return z.cast<double>(); }

inline bool lattice_eq(const Lattice& a, const Lattice& b) {
    return a.size() == b.size() && a == b;
}

// Lexicographic order; fixes a canonical atom ordering so inverse-CDF
// sampling is platform independent.
inline bool lattice_less(const Lattice& a, const Lattice& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

inline std::uint64_t lattice_hash(const Lattice& z) {
    std::uint64_t h = 0x51a299f8d02c31ddULL ^ static_cast<std::uint64_t>(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        h = hash_combine(h, static_cast<std::uint64_t>(z[i]));
    }
    return h;
}

struct LatticeHash {
    std::size_t operator()(const Lattice& z) const {
        return static_cast<std::size_t>(lattice_hash(z));
    }
};

struct LatticeEq {
    bool operator()(const Lattice& a, const Lattice& b) const { return lattice_eq(a, b); }
};

struct LatticeLess {
    bool operator()(const Lattice& a, const Lattice& b) const { return lattice_less(a, b); }
};

inline Lattice make_lattice(std::initializer_list<std::int64_t> coords) {
    Lattice z(static_cast<Eigen::Index>(coords.size()));
    Eigen::Index i = 0;
    for (auto c : coords) z[i++] = c;
    return z;
}

} // namespace rwre

#endif
