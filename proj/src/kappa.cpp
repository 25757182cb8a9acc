#include "rwre/kappa.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rwre/pairchain.hpp"

namespace rwre {

double diffusion_exact_1d(const EnvironmentLaw& law) {
    if (law.dim() != 1) throw std::invalid_argument("diffusion_exact_1d: d = 1 required");
    const double v = exact_velocity_1d(law);
    double num = 0.0, den = 0.0;
    for (const auto& atom : law.site_law().atoms()) {
        const double hold = atom.jd.holding_prob();
        const double esc = 1.0 - hold;
        double j1 = 0.0, j2 = 0.0;   // embedded-jump moments
        for (const auto& jump : atom.jd.atoms()) {
            const double z = static_cast<double>(jump.z[0]);
            if (jump.z[0] != 0) {
                j1 += jump.p / esc * z;
                j2 += jump.p / esc * z * z;
            }
        }
        const double et = 1.0 / esc;                      // E(sojourn)
        const double et2 = (1.0 + hold) / (esc * esc);    // E(sojourn^2)
        num += atom.weight * (j2 - 2.0 * v * j1 * et + v * v * et2);
        den += atom.weight * et;
    }
    return num / den;
}

namespace {

// Window state for the second-moment transfer: entries P_z(V_{m-r}) for
// walker starts z = 0..R and ages r = 0..R-1.
struct Engine {
    std::int64_t A = 0;              // atoms
    std::int64_t R = 0;              // max jump
    std::int64_t K = 0;              // window size (R+1) * R
    std::int64_t alpha_count = 0;    // A^{R-1} recent-atom codes

    std::vector<double> w;                        // atom weights
    std::vector<std::vector<double>> emb;         // embedded jump probs per atom
    std::vector<double> esc, g, h, psi_den;       // per atom

    std::int64_t idx(std::int64_t z, std::int64_t r) const { return z * R + r; }
    std::int64_t atom_of(std::int64_t alpha, std::int64_t t) const {
        std::int64_t code = alpha;
        for (std::int64_t s = 0; s < t; ++s) code /= A;
        return code % A;
    }
};

} // namespace

OneDimCoefficients kappa_coeffs_formula(const EnvironmentLaw& law, const KappaTruncation& trunc) {
    if (law.dim() != 1) throw std::invalid_argument("kappa_coeffs_formula: d = 1 required");
    const auto& atoms = law.site_law().atoms();

    Engine e;
    e.A = static_cast<std::int64_t>(atoms.size());
    e.R = law.max_abs_jump();
    e.K = (e.R + 1) * e.R;
    e.alpha_count = 1;
    for (std::int64_t t = 0; t + 1 < e.R; ++t) e.alpha_count *= e.A;
    if (e.alpha_count * e.A * e.K * e.K > 8'000'000)
        throw std::runtime_error("kappa_coeffs_formula: atom mixture too rich for the exact engine");

    const double v = exact_velocity_1d(law);
    double Z = 0.0, EH2 = 0.0;
    std::vector<double> pi0(static_cast<std::size_t>(e.A));
    std::vector<std::vector<double>> dense(static_cast<std::size_t>(e.A),
                                           std::vector<double>(static_cast<std::size_t>(e.R) + 1, 0.0));
    for (std::int64_t a = 0; a < e.A; ++a) {
        const auto& jd = atoms[static_cast<std::size_t>(a)].jd;
        e.w.push_back(atoms[static_cast<std::size_t>(a)].weight);
        for (const auto& jump : jd.atoms())
            dense[static_cast<std::size_t>(a)][static_cast<std::size_t>(jump.z[0])] = jump.p;
        const double hold = jd.holding_prob();
        e.esc.push_back(1.0 - hold);
        e.g.push_back(jd.drift()[0] - v);
        e.h.push_back(e.g.back() / e.esc.back());
        e.emb.push_back(embedded_jump_probs(jd, e.R));
        pi0[static_cast<std::size_t>(a)] = hold;
        Z += e.w.back() / e.esc.back();
        EH2 += e.w.back() * e.h.back() * e.h.back();
    }

    // E_inf pi_{0k} via the density (1 - pi_00)^{-1} / E[(1 - pi_00)^{-1}]
    std::vector<double> c(static_cast<std::size_t>(e.R), 0.0);   // c_k = sum_{y>k} E_inf pi_0y
    for (std::int64_t k = 0; k < e.R; ++k) {
        double s = 0.0;
        for (std::int64_t a = 0; a < e.A; ++a) {
            for (std::int64_t y = k + 1; y <= e.R; ++y)
                s += e.w[static_cast<std::size_t>(a)] *
                     dense[static_cast<std::size_t>(a)][static_cast<std::size_t>(y)] /
                     e.esc[static_cast<std::size_t>(a)];
        }
        c[static_cast<std::size_t>(k)] = s / Z;
    }

    // single-site pieces of kappa_q^2
    double N1 = 0.0, N2 = 0.0;
    for (std::int64_t a = 0; a < e.A; ++a) {
        const double wa = e.w[static_cast<std::size_t>(a)];
        const double inv_esc = 1.0 / e.esc[static_cast<std::size_t>(a)];
        double site = 0.0;
        for (std::int64_t y = 0; y <= e.R; ++y) {
            const double py = dense[static_cast<std::size_t>(a)][static_cast<std::size_t>(y)];
            site += py * (static_cast<double>(y) - v) * (static_cast<double>(y) - v);
        }
        N1 += wa * inv_esc * site;
        const double drift_open = e.g[static_cast<std::size_t>(a)] +
                                  v * pi0[static_cast<std::size_t>(a)];
        N2 += -2.0 * wa * inv_esc * drift_open * e.h[static_cast<std::size_t>(a)];
    }

    OneDimCoefficients out;
    out.method = "formula";
    out.diffusion = diffusion_exact_1d(law);

    // Degenerate drift: both series vanish termwise.
    if (EH2 == 0.0) {
        out.kappa_m_sq = 0.0;
        out.kappa_q_sq = N1 / Z;
        return out;
    }

    // readout vectors on the age-0 column
    Eigen::VectorXd ell = Eigen::VectorXd::Zero(e.K);
    ell(e.idx(0, 0)) = c[0];
    for (std::int64_t z = 1; z < e.R; ++z)
        ell(e.idx(z, 0)) = c[static_cast<std::size_t>(z)] - c[static_cast<std::size_t>(z - 1)];
    ell(e.idx(e.R, 0)) = -c[static_cast<std::size_t>(e.R - 1)];
    std::vector<Eigen::VectorXd> qvec;
    for (std::int64_t y = 1; y <= e.R; ++y) {
        Eigen::VectorXd q = Eigen::VectorXd::Zero(e.K);
        q(e.idx(0, 0)) = 1.0;
        q(e.idx(y, 0)) -= 1.0;
        qvec.push_back(q);
    }

    // annealed pair-meeting survival curves for the tail certificates
    std::vector<PairChainResult> gamma;
    for (std::int64_t y = 1; y <= e.R; ++y)
        gamma.push_back(annealed_pair_survival(law, y, trunc.max_index + e.R + 1));
    double c_sum = 0.0;
    for (const double ck : c) c_sum += ck;
    std::vector<double> psi_max(static_cast<std::size_t>(e.R) + 1, 0.0);
    for (std::int64_t y = 1; y <= e.R; ++y) {
        for (std::int64_t a = 0; a < e.A; ++a)
            psi_max[static_cast<std::size_t>(y)] =
                std::max(psi_max[static_cast<std::size_t>(y)],
                         dense[static_cast<std::size_t>(a)][static_cast<std::size_t>(y)] /
                             e.esc[static_cast<std::size_t>(a)]);
    }
    auto tail_m_bound = [&](std::int64_t m) {
        // T_i <= (sum_k c_k) * sum_k c_k gamma^{(1)}_{i-k} by Cauchy-Schwarz
        double s = 0.0;
        for (std::int64_t k = 0; k < e.R; ++k)
            s += c[static_cast<std::size_t>(k)] * survival_tail_sum(gamma[0], std::max<std::int64_t>(m - k, 0));
        return (EH2 / v) * c_sum * s;
    };
    auto tail_q_bound = [&](std::int64_t m) {
        double s = 0.0;
        for (std::int64_t y = 1; y <= e.R; ++y)
            s += psi_max[static_cast<std::size_t>(y)] *
                 survival_tail_sum(gamma[static_cast<std::size_t>(y - 1)], m);
        return (EH2 / Z) * s;
    };

    // ---- enumeration phase: steps 0..m0 = R exactly over atom combos ------
    const std::int64_t m0 = e.R;
    double S_T = 0.0;                                           // sum of T_i
    std::vector<double> S_Q(static_cast<std::size_t>(e.R), 0.0);   // sums of Phi^y_m, m >= 1

    // tensors X[b][alpha], b = site-0 atom
    std::vector<std::vector<Eigen::MatrixXd>> X(
        static_cast<std::size_t>(e.A),
        std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(e.alpha_count),
                                     Eigen::MatrixXd::Zero(e.K, e.K)));

    std::int64_t combos = 1;
    for (std::int64_t s = 0; s < m0; ++s) combos *= e.A;
    std::vector<std::int64_t> assign(static_cast<std::size_t>(std::max<std::int64_t>(m0, 1)));
    for (std::int64_t code = 0; code < combos; ++code) {
        std::int64_t rem = code;
        double weight = 1.0;
        for (std::int64_t s = 0; s < m0; ++s) {
            assign[static_cast<std::size_t>(s)] = rem % e.A;
            rem /= e.A;
            weight *= e.w[static_cast<std::size_t>(assign[static_cast<std::size_t>(s)])];
        }
        // P_z(V_m) for z = 0..R, m = 0..m0 under this assignment
        std::vector<std::vector<double>> P(static_cast<std::size_t>(e.R) + 1,
                                           std::vector<double>(static_cast<std::size_t>(m0) + 1, 0.0));
        for (std::int64_t z = 0; z <= e.R; ++z) {
            for (std::int64_t m = 0; m <= m0; ++m) {
                if (m < z) continue;
                if (m == z) {
                    P[static_cast<std::size_t>(z)][static_cast<std::size_t>(m)] = 1.0;
                    continue;
                }
                double val = 0.0;
                for (std::int64_t j = 1; j <= std::min(e.R, m); ++j) {
                    const auto site_atom = assign[static_cast<std::size_t>(m - j)];
                    val += e.emb[static_cast<std::size_t>(site_atom)][static_cast<std::size_t>(j)] *
                           P[static_cast<std::size_t>(z)][static_cast<std::size_t>(m - j)];
                }
                P[static_cast<std::size_t>(z)][static_cast<std::size_t>(m)] = val;
            }
        }
        // readouts for i = 0..m0 (kappa_m) and m = 1..m0 (kappa_q)
        for (std::int64_t i = 0; i <= m0; ++i) {
            double lin = 0.0;
            for (std::int64_t k = 0; k < e.R; ++k) {
                const double pk = P[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
                const double pk1 = P[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(i)];
                lin += c[static_cast<std::size_t>(k)] * (pk - pk1);
            }
            S_T += weight * lin * lin;
        }
        const std::int64_t b = m0 >= 1 ? assign[0] : 0;
        for (std::int64_t m = 1; m <= m0; ++m) {
            for (std::int64_t y = 1; y <= e.R; ++y) {
                const double d = P[0][static_cast<std::size_t>(m)] -
                                 P[static_cast<std::size_t>(y)][static_cast<std::size_t>(m)];
                const double psi = dense[static_cast<std::size_t>(b)][static_cast<std::size_t>(y)] /
                                   e.esc[static_cast<std::size_t>(b)];
                S_Q[static_cast<std::size_t>(y - 1)] += weight * psi * d * d;
            }
        }
        // seed the transfer tensors at m0
        Eigen::VectorXd wvec(e.K);
        for (std::int64_t z = 0; z <= e.R; ++z) {
            for (std::int64_t r = 0; r < e.R; ++r)
                wvec(e.idx(z, r)) = P[static_cast<std::size_t>(z)][static_cast<std::size_t>(m0 - r)];
        }
        std::int64_t alpha = 0;
        for (std::int64_t t = e.R - 2; t >= 0; --t) alpha = alpha * e.A + assign[static_cast<std::size_t>(1 + t)];
        X[static_cast<std::size_t>(b)][static_cast<std::size_t>(alpha)] += weight * wvec * wvec.transpose();
    }

    // ---- transfer phase ----------------------------------------------------
    // step matrices T[alpha][a]: new age-0 column from the window and the
    // freshly drawn site, other columns shifted by one age
    std::vector<std::vector<Eigen::MatrixXd>> T(
        static_cast<std::size_t>(e.alpha_count),
        std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(e.A),
                                     Eigen::MatrixXd::Zero(e.K, e.K)));
    for (std::int64_t alpha = 0; alpha < e.alpha_count; ++alpha) {
        for (std::int64_t a = 0; a < e.A; ++a) {
            auto& Tm = T[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(a)];
            for (std::int64_t z = 0; z <= e.R; ++z) {
                for (std::int64_t j = 1; j <= e.R; ++j) {
                    // site m+1-j: j = 1 is the new atom, j >= 2 sits in alpha
                    const std::int64_t site_atom = (j == 1) ? a : e.atom_of(alpha, e.R - j);
                    Tm(e.idx(z, 0), e.idx(z, j - 1)) +=
                        e.emb[static_cast<std::size_t>(site_atom)][static_cast<std::size_t>(j)];
                }
                for (std::int64_t r = 1; r < e.R; ++r) Tm(e.idx(z, r), e.idx(z, r - 1)) = 1.0;
            }
        }
    }

    const std::int64_t alpha_div = std::max<std::int64_t>(e.alpha_count / e.A, 1);
    std::int64_t m = m0;
    for (;;) {
        const double tm = tail_m_bound(m);
        const double tq = tail_q_bound(m);
        if (tm + tq <= trunc.tol) {
            out.kappa_m_tail = tm;
            out.kappa_q_tail = tq;
            out.series_index = m;
            break;
        }
        if (m >= trunc.max_index) {
            throw std::runtime_error("kappa_coeffs_formula: certified tail " +
                                     std::to_string(tm + tq) + " above tolerance at index cap");
        }
        // advance every tensor one site
        std::vector<std::vector<Eigen::MatrixXd>> Xn(
            static_cast<std::size_t>(e.A),
            std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(e.alpha_count),
                                         Eigen::MatrixXd::Zero(e.K, e.K)));
        for (std::int64_t b = 0; b < e.A; ++b) {
            for (std::int64_t alpha = 0; alpha < e.alpha_count; ++alpha) {
                const auto& Xcur = X[static_cast<std::size_t>(b)][static_cast<std::size_t>(alpha)];
                for (std::int64_t a = 0; a < e.A; ++a) {
                    const auto& Tm = T[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(a)];
                    const std::int64_t alpha_next =
                        e.alpha_count == 1 ? 0 : (alpha / e.A + a * alpha_div);
                    Xn[static_cast<std::size_t>(b)][static_cast<std::size_t>(alpha_next)] +=
                        e.w[static_cast<std::size_t>(a)] * Tm * Xcur * Tm.transpose();
                }
            }
        }
        X.swap(Xn);
        ++m;
        // readouts at the new step
        for (std::int64_t b = 0; b < e.A; ++b) {
            Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(e.K, e.K);
            for (std::int64_t alpha = 0; alpha < e.alpha_count; ++alpha)
                sum += X[static_cast<std::size_t>(b)][static_cast<std::size_t>(alpha)];
            S_T += ell.dot(sum * ell);
            for (std::int64_t y = 1; y <= e.R; ++y) {
                const double psi = dense[static_cast<std::size_t>(b)][static_cast<std::size_t>(y)] /
                                   e.esc[static_cast<std::size_t>(b)];
                S_Q[static_cast<std::size_t>(y - 1)] +=
                    psi * qvec[static_cast<std::size_t>(y - 1)].dot(sum * qvec[static_cast<std::size_t>(y - 1)]);
            }
        }
    }

    // sums of squares in exact arithmetic; clamp rounding dust
    out.kappa_m_sq = std::max(0.0, (EH2 / v) * S_T);
    double q_series = 0.0;
    for (const double s : S_Q) q_series += s;
    out.kappa_q_sq = std::max(0.0, (N1 + N2 + EH2 + EH2 * q_series) / Z);
    return out;
}

} // namespace rwre
