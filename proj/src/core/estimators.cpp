// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#include "estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ppcomp {

const char* to_string(Algorithm a)
{
    return a == Algorithm::COMP ? "COMP" : "PPCOMP";
}

SolverOptions SolverOptions::defaults_for(std::size_t n_paths)
{
    SolverOptions o;
    o.k_max = std::max<std::size_t>(1, 2 * n_paths);
    return o;
}

void SolverOptions::validate() const
{
    if (!(epsilon_rel > 0.0))
        throw std::invalid_argument("solver: epsilon_rel must be positive");
    if (k_max == 0 || p_max == 0)
        throw std::invalid_argument("solver: k_max and p_max must be positive");
    if (!(step_init > 0.0))
        throw std::invalid_argument("solver: step_init must be positive");
    if (!(step_shrink > 0.0 && step_shrink < 1.0))
        throw std::invalid_argument("solver: step_shrink must lie in (0, 1)");
    if (!(grad_tol > 0.0))
        throw std::invalid_argument("solver: grad_tol must be positive");
}

void SupportState::push(const Dictionary& dict, std::size_t j)
{
    indices.push_back(j);
    base_angles.push_back(dict.angles(j));
    current_angles.push_back(dict.angles(j));
    bounds.push_back(dict.bounds(j));
}

AnglePair SupportState::lower_limit(std::size_t l) const
{
    return {base_angles[l].rx - bounds[l].rx.lower, base_angles[l].tx - bounds[l].tx.lower};
}

AnglePair SupportState::upper_limit(std::size_t l) const
{
    return {base_angles[l].rx + bounds[l].rx.upper, base_angles[l].tx + bounds[l].tx.upper};
}

bool SupportState::feasible(std::size_t l, double slack) const
{
    const AnglePair lo = lower_limit(l);
    const AnglePair hi = upper_limit(l);
    const AnglePair& a = current_angles[l];
    return a.rx >= lo.rx - slack && a.rx <= hi.rx + slack && a.tx >= lo.tx - slack &&
           a.tx <= hi.tx + slack;
}

CMatrix sample_covariance(const CMatrix& measurements)
{
    if (measurements.cols() == 0 || measurements.rows() == 0)
        throw std::invalid_argument("sample_covariance: empty snapshot set");
    CMatrix r = measurements * measurements.adjoint();
    r /= static_cast<double>(measurements.cols());
    return hermitian_part(r);
}

CMatrix sample_covariance(const SnapshotSet& snaps)
{
    return sample_covariance(snaps.measurements);
}

std::size_t project_select(const CMatrix& r_res, const CMatrix& composed,
                           std::span<const std::size_t> excluded)
{
    if (r_res.rows() != composed.rows() || r_res.cols() != composed.rows())
        throw DimensionError("project_select: residual and dictionary row counts differ");
    const auto n = static_cast<std::size_t>(composed.cols());
    std::vector<char> skip(n, 0);
    for (std::size_t j : excluded)
        if (j < n)
            skip[j] = 1;

    const CMatrix rd = r_res * composed;
    std::size_t best = n;
    double best_val = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (skip[j])
            continue;
        const auto c = static_cast<Eigen::Index>(j);
        const double val = std::abs(composed.col(c).dot(rd.col(c)));
        if (val > best_val) {
            best_val = val;
            best = j;
        }
    }
    if (best == n)
        throw std::invalid_argument("project_select: every dictionary column is excluded");
    return best;
}

GammaFit gamma_ls(const CMatrix& r_y, const CMatrix& v, GammaMode mode)
{
    if (v.cols() < 1)
        throw std::invalid_argument("gamma_ls: need at least one atom");
    if (r_y.rows() != v.rows() || r_y.cols() != v.rows())
        throw DimensionError("gamma_ls: atom length does not match R_y");
    const Eigen::Index k = v.cols();
    GammaFit fit;
    if (mode == GammaMode::Joint) {
        Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(v);
        fit.rank_deficient = cod.rank() < k;
        const CMatrix pinv = cod.pseudoInverse();
        fit.gamma = pinv * r_y * pinv.adjoint();
    } else {
        // each atom's own pseudo-inverse v^H / |v|^2; upper triangle then mirror
        CMatrix pinv(k, v.rows());
        for (Eigen::Index l = 0; l < k; ++l) {
            const double nrm2 = v.col(l).squaredNorm();
            if (nrm2 > 0.0) {
                pinv.row(l) = v.col(l).adjoint() / nrm2;
            } else {
                pinv.row(l).setZero();
                fit.rank_deficient = true;
            }
        }
        fit.gamma.resize(k, k);
        for (Eigen::Index l = 0; l < k; ++l) {
            for (Eigen::Index q = l; q < k; ++q) {
                const cdouble g = (pinv.row(l) * r_y * pinv.row(q).adjoint())(0, 0);
                fit.gamma(l, q) = g;
                fit.gamma(q, l) = std::conj(g);
            }
            fit.gamma(l, l) = fit.gamma(l, l).real();
        }
    }
    fit.gamma = hermitian_part(fit.gamma);
    return fit;
}

CMatrix compressed_atoms(std::span<const AnglePair> angles, const CMatrix& phi, ArrayDims dims)
{
    if (static_cast<std::size_t>(phi.cols()) != dims.channel_length())
        throw DimensionError("phi column count must equal M*N");
    CMatrix a(static_cast<Eigen::Index>(dims.channel_length()),
              static_cast<Eigen::Index>(angles.size()));
    for (std::size_t l = 0; l < angles.size(); ++l)
        a.col(static_cast<Eigen::Index>(l)) = atom(angles[l].rx, angles[l].tx, dims);
    return phi * a;
}

namespace {

CMatrix residual_from(const CMatrix& r_y, const CMatrix& v, const CMatrix& gamma)
{
    return hermitian_part(r_y - v * gamma * v.adjoint());
}

struct Evaluation {
    CMatrix v;
    CMatrix gamma;
    CMatrix residual;
    double energy = 0.0;
    bool rank_deficient = false;
};

Evaluation evaluate(const CMatrix& r_y, const std::vector<AnglePair>& angles, const CMatrix& phi,
                    ArrayDims dims, GammaMode mode)
{
    Evaluation ev;
    ev.v = compressed_atoms(angles, phi, dims);
    GammaFit fit = gamma_ls(r_y, ev.v, mode);
    ev.gamma = std::move(fit.gamma);
    ev.rank_deficient = fit.rank_deficient;
    ev.residual = residual_from(r_y, ev.v, ev.gamma);
    ev.energy = ev.residual.squaredNorm();
    return ev;
}

double correlation(const CMatrix& v, Eigen::Index l, Eigen::Index q)
{
    const double nl = v.col(l).norm();
    const double nq = v.col(q).norm();
    if (nl == 0.0 || nq == 0.0)
        return 0.0;
    return std::abs(v.col(l).dot(v.col(q))) / (nl * nq);
}

Directions directions_at(const CMatrix& v, const CMatrix& gamma, const CMatrix& r_res,
                         std::span<const AnglePair> angles, const CMatrix& phi, ArrayDims dims)
{
    const auto k = static_cast<Eigen::Index>(angles.size());
    Directions d{RVector::Zero(k), RVector::Zero(k)};
    // d(V G V^H)/d theta_l = v'_l u_l^H + u_l v'_l^H with u_l = (V G)_{:,l}, so
    // -1/2 d|E|^2/d theta_l = 2 Re(u_l^H E v'_l) for Hermitian E
    const CMatrix u = v * gamma;
    for (Eigen::Index l = 0; l < k; ++l) {
        const AnglePair& a = angles[static_cast<std::size_t>(l)];
        const CVector e_u = r_res * u.col(l);
        const CVector dv_rx = phi * atom_derivative_rx(a.rx, a.tx, dims);
        const CVector dv_tx = phi * atom_derivative_tx(a.rx, a.tx, dims);
        d.rx(l) = 2.0 * e_u.dot(dv_rx).real();
        d.tx(l) = 2.0 * e_u.dot(dv_tx).real();
    }
    return d;
}

// Same quantity with respect to u = cos(theta). The grid is uniform in u and
// d a / d u = j pi m a never vanishes, whereas d a / d theta = 0 at theta = 0
// (grid index 0), which would pin an atom there.
Directions cosine_directions(const CMatrix& v, const CMatrix& gamma, const CMatrix& r_res,
                             std::span<const AnglePair> angles, const CMatrix& phi, ArrayDims dims)
{
    const auto k = static_cast<Eigen::Index>(angles.size());
    const auto n_ue = static_cast<Eigen::Index>(dims.ue);
    const auto len = static_cast<Eigen::Index>(dims.channel_length());
    Directions d{RVector::Zero(k), RVector::Zero(k)};
    const CMatrix u = v * gamma;
    CVector da_rx(len), da_tx(len);
    for (Eigen::Index l = 0; l < k; ++l) {
        const AnglePair& ang = angles[static_cast<std::size_t>(l)];
        const CVector a = atom(ang.rx, ang.tx, dims);
        // entry i_bs * N + i_ue carries exp(j pi (i_ue u_rx - i_bs u_tx))
        for (Eigen::Index i = 0; i < len; ++i) {
            da_rx(i) = a(i) * cdouble(0.0, kPi * static_cast<double>(i % n_ue));
            da_tx(i) = a(i) * cdouble(0.0, -kPi * static_cast<double>(i / n_ue));
        }
        const CVector e_u = r_res * u.col(l);
        d.rx(l) = 2.0 * e_u.dot(phi * da_rx).real();
        d.tx(l) = 2.0 * e_u.dot(phi * da_tx).real();
    }
    return d;
}

} // namespace

CMatrix residual_covariance(const CMatrix& r_y, const SupportState& support, const CMatrix& phi,
                            ArrayDims dims)
{
    if (support.size() == 0)
        return r_y;
    if (support.gamma.rows() != static_cast<Eigen::Index>(support.size()) ||
        support.gamma.cols() != static_cast<Eigen::Index>(support.size()))
        throw DimensionError("residual_covariance: gamma does not match the support size");
    const CMatrix v = compressed_atoms(support.current_angles, phi, dims);
    if (v.rows() != r_y.rows())
        throw DimensionError("residual_covariance: phi rows do not match R_y");
    return residual_from(r_y, v, support.gamma);
}

Directions gradient_directions(const SupportState& support, const CMatrix& r_res,
                               const CMatrix& phi, ArrayDims dims)
{
    if (support.size() == 0)
        throw std::invalid_argument("gradient_directions: empty support");
    const CMatrix v = compressed_atoms(support.current_angles, phi, dims);
    return directions_at(v, support.gamma, r_res, support.current_angles, phi, dims);
}

SupportState perturbation_solver(const CMatrix& r_y, const SupportState& support,
                                 const CMatrix& phi, ArrayDims dims, const SolverOptions& opts,
                                 SolverReport* report, const SolverObserver& observer)
{
    const std::size_t k = support.size();
    if (k == 0)
        throw std::invalid_argument("perturbation_solver: empty support");

    SupportState state = support;
    SolverReport local;
    SolverReport& rep = report ? *report : local;
    rep = SolverReport{};

    const double scale_energy = r_y.squaredNorm();
    Evaluation cur = evaluate(r_y, state.current_angles, phi, dims, opts.gamma_mode);
    rep.rank_deficient = cur.rank_deficient;
    rep.residuals.push_back(cur.energy);
    if (observer)
        observer({0, &state.current_angles, cur.energy});

    std::vector<char> frozen(k, 0);
    for (std::size_t l = 0; l < k; ++l)
        for (std::size_t q = l + 1; q < k; ++q)
            if (!frozen[q] && correlation(cur.v, static_cast<Eigen::Index>(l),
                                          static_cast<Eigen::Index>(q)) > opts.collapse_correlation) {
                frozen[q] = 1;
                ++rep.frozen;
            }

    // Descent runs in z = cos(theta) / w with w the cell width in cos(theta),
    // one coordinate per atom and axis (rx at 2l, tx at 2l + 1).
    const auto n = static_cast<Eigen::Index>(2 * k);
    RVector lo_u(n), hi_u(n);
    for (std::size_t l = 0; l < k; ++l) {
        const AnglePair lo = state.lower_limit(l);
        const AnglePair hi = state.upper_limit(l);
        const auto i = static_cast<Eigen::Index>(2 * l);
        lo_u(i) = std::cos(hi.rx);
        hi_u(i) = std::cos(lo.rx);
        lo_u(i + 1) = std::cos(hi.tx);
        hi_u(i + 1) = std::cos(lo.tx);
    }
    const RVector width = (hi_u - lo_u).cwiseMax(1e-300);
    const auto scaled_position = [&](const std::vector<AnglePair>& ang) {
        RVector z(n);
        for (std::size_t l = 0; l < k; ++l) {
            z(static_cast<Eigen::Index>(2 * l)) = std::cos(ang[l].rx);
            z(static_cast<Eigen::Index>(2 * l + 1)) = std::cos(ang[l].tx);
        }
        return RVector(z.cwiseQuotient(width));
    };
    // components pushing against an active bound are dropped so they do not
    // dominate the step normalisation or the curvature estimate
    const auto scaled_direction = [&](const Directions& d, const RVector& z) {
        RVector q(n);
        for (std::size_t l = 0; l < k; ++l) {
            const auto li = static_cast<Eigen::Index>(l);
            q(2 * li) = frozen[l] ? 0.0 : d.rx(li) * width(2 * li);
            q(2 * li + 1) = frozen[l] ? 0.0 : d.tx(li) * width(2 * li + 1);
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            const double u = z(i) * width(i);
            const double tol = 1e-12 * width(i);
            if ((q(i) > 0.0 && u >= hi_u(i) - tol) || (q(i) < 0.0 && u <= lo_u(i) + tol))
                q(i) = 0.0;
        }
        return q;
    };

    RVector prev_z, prev_q;
    bool have_prev = false;
    for (std::size_t p = 1; p <= opts.p_max; ++p) {
        if (cur.energy <= 1e-28 * scale_energy)
            break;
        const Directions d =
            cosine_directions(cur.v, cur.gamma, cur.residual, state.current_angles, phi, dims);
        const RVector z = scaled_position(state.current_angles);

        std::vector<AnglePair> trial(k);
        bool accepted = false;
        Evaluation next;
        RVector q = scaled_direction(d, z);
        double qmax = q.cwiseAbs().maxCoeff();
        // First step (and after the active set changes) moves the steepest
        // coordinate step_init of its cell. Afterwards each coordinate takes
        // its own secant length |dz_i / dq_i|, falling back to the spectral
        // (Barzilai-Borwein) length where the secant is not informative.
        RVector mu = RVector::Constant(n, opts.step_init / qmax);
        if (have_prev && ((q.array() == 0.0) == (prev_q.array() == 0.0)).all()) {
            const RVector dz = z - prev_z;
            const RVector dq = q - prev_q;
            const double curvature = -dz.dot(dq);
            const double spectral = curvature > 0.0 ? dz.squaredNorm() / curvature : opts.step_init / qmax;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double c = -dz(i) * dq(i);
                mu(i) = c > 1e-12 * std::abs(dz(i)) * dq.norm() ? dz(i) * dz(i) / c : spectral;
            }
        }
        std::size_t shrinks = 0;
        while (true) {
            if (!(qmax > 0.0) || !std::isfinite(qmax))
                break;
            // at most one cell per coordinate and step
            for (Eigen::Index i = 0; i < n; ++i)
                if (q(i) != 0.0)
                    mu(i) = std::min(mu(i), 1.0 / std::abs(q(i)));

            // clamping in cos(theta) keeps theta inside the cell
            for (std::size_t l = 0; l < k; ++l) {
                const auto i = static_cast<Eigen::Index>(2 * l);
                const AnglePair lo = state.lower_limit(l);
                const AnglePair hi = state.upper_limit(l);
                const double u_rx = std::clamp((z(i) + mu(i) * q(i)) * width(i), lo_u(i), hi_u(i));
                const double u_tx = std::clamp((z(i + 1) + mu(i + 1) * q(i + 1)) * width(i + 1),
                                               lo_u(i + 1), hi_u(i + 1));
                trial[l].rx = std::clamp(std::acos(u_rx), lo.rx, hi.rx);
                trial[l].tx = std::clamp(std::acos(u_tx), lo.tx, hi.tx);
            }

            next = evaluate(r_y, trial, phi, dims, opts.gamma_mode);

            // an atom sliding onto another one is frozen where it stands
            bool collapsed = false;
            for (std::size_t l = 0; l < k && !collapsed; ++l) {
                for (std::size_t q2 = l + 1; q2 < k && !collapsed; ++q2) {
                    const auto li = static_cast<Eigen::Index>(l);
                    const auto qi = static_cast<Eigen::Index>(q2);
                    if (correlation(next.v, li, qi) > opts.collapse_correlation &&
                        correlation(cur.v, li, qi) <= opts.collapse_correlation) {
                        const std::size_t victim = frozen[q2] ? l : q2;
                        if (!frozen[victim]) {
                            frozen[victim] = 1;
                            ++rep.frozen;
                            collapsed = true;
                        }
                    }
                }
            }
            if (collapsed) {
                q = scaled_direction(d, z);
                qmax = q.cwiseAbs().maxCoeff();
                have_prev = false;
                continue;
            }

            if (next.energy <= cur.energy) {
                accepted = true;
                break;
            }
            if (++shrinks > opts.max_shrinks)
                break;
            mu *= opts.step_shrink;
        }
        if (!accepted)
            break;

        double max_change = 0.0;
        for (std::size_t l = 0; l < k; ++l) {
            max_change = std::max({max_change, std::abs(trial[l].rx - state.current_angles[l].rx),
                                   std::abs(trial[l].tx - state.current_angles[l].tx)});
        }
        const double rel_decrease =
            cur.energy > 0.0 ? (cur.energy - next.energy) / cur.energy : 0.0;

        prev_z = z;
        prev_q = q;
        have_prev = true;
        state.current_angles = trial;
        cur = std::move(next);
        rep.rank_deficient = rep.rank_deficient || cur.rank_deficient;
        rep.iterations = p;
        rep.residuals.push_back(cur.energy);
        if (observer)
            observer({p, &state.current_angles, cur.energy});

        if (max_change < opts.grad_tol || rel_decrease < opts.min_rel_decrease)
            break;
    }

    state.gamma = cur.gamma;
    return state;
}

CMatrix assemble_covariance(const SupportState& support, ArrayDims dims)
{
    const auto n = static_cast<Eigen::Index>(dims.channel_length());
    if (support.size() == 0)
        return CMatrix::Zero(n, n);
    CMatrix a(n, static_cast<Eigen::Index>(support.size()));
    for (std::size_t l = 0; l < support.size(); ++l) {
        const AnglePair& p = support.current_angles[l];
        a.col(static_cast<Eigen::Index>(l)) = atom(p.rx, p.tx, dims);
    }
    return hermitian_part(a * support.gamma * a.adjoint());
}

namespace {

CovarianceEstimate greedy(Algorithm alg, const CMatrix& r_y, const Dictionary& dict,
                          const CMatrix& phi, const SolverOptions& opts, const CMatrix& composed_in)
{
    opts.validate();
    const ArrayDims dims = dict.dims;
    if (static_cast<std::size_t>(phi.cols()) != dims.channel_length())
        throw DimensionError("estimator: phi has " + std::to_string(phi.cols()) +
                             " columns, expected M*N = " + std::to_string(dims.channel_length()));
    if (r_y.rows() != phi.rows() || r_y.cols() != phi.rows())
        throw DimensionError("estimator: R_y must be m x m with m = rows of phi");
    if (hermitian_asymmetry(r_y) > 1e-8)
        throw NotHermitianError("estimator: R_y is not Hermitian");

    const CMatrix composed = composed_in.size() == 0 ? CMatrix(phi * dict.atoms) : composed_in;
    if (composed.rows() != phi.rows() || static_cast<std::size_t>(composed.cols()) != dict.size())
        throw DimensionError("estimator: composed dictionary has the wrong shape");

    CovarianceEstimate est;
    est.initial_energy = r_y.squaredNorm();
    est.support.gamma.resize(0, 0);
    Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(phi);
    est.diagnostics.sensing_rank_deficient = cod.rank() < std::min(phi.rows(), phi.cols());

    if (est.initial_energy == 0.0) {
        est.r_h_hat = CMatrix::Zero(static_cast<Eigen::Index>(dims.channel_length()),
                                    static_cast<Eigen::Index>(dims.channel_length()));
        return est;
    }

    const std::size_t k_max = std::min(opts.k_max, dict.size());
    double energy = est.initial_energy;
    CMatrix r_res = r_y;
    SupportState& state = est.support;

    while (state.size() < k_max && energy / est.initial_energy >= opts.epsilon_rel) {
        const std::size_t j = project_select(r_res, composed, state.indices);
        state.push(dict, j);

        if (alg == Algorithm::PPCOMP) {
            // start from the earlier perturbations or from the bare grid,
            // whichever fits better
            SupportState at_grid = state;
            at_grid.current_angles = at_grid.base_angles;
            const Evaluation warm = evaluate(r_y, state.current_angles, phi, dims, opts.gamma_mode);
            const Evaluation cold = evaluate(r_y, at_grid.current_angles, phi, dims, opts.gamma_mode);
            const SupportState& start = cold.energy < warm.energy ? at_grid : state;

            SolverReport rep;
            state = perturbation_solver(r_y, start, phi, dims, opts, &rep);
            est.solver_iterations.push_back(rep.iterations);
            est.diagnostics.rank_deficient = est.diagnostics.rank_deficient || rep.rank_deficient;
            est.diagnostics.frozen_atoms += rep.frozen;
        } else {
            const CMatrix v = compressed_atoms(state.current_angles, phi, dims);
            GammaFit fit = gamma_ls(r_y, v, opts.gamma_mode);
            state.gamma = std::move(fit.gamma);
            est.diagnostics.rank_deficient = est.diagnostics.rank_deficient || fit.rank_deficient;
            est.solver_iterations.push_back(0);
        }

        r_res = residual_covariance(r_y, state, phi, dims);
        energy = r_res.squaredNorm();
        est.residual_history.push_back(energy);
    }

    est.r_h_hat = assemble_covariance(state, dims);
    return est;
}

} // namespace

CovarianceEstimate ppcomp(const CMatrix& r_y, const Dictionary& dict, const CMatrix& phi,
                          const SolverOptions& opts, const CMatrix& composed)
{
    return greedy(Algorithm::PPCOMP, r_y, dict, phi, opts, composed);
}

CovarianceEstimate comp(const CMatrix& r_y, const Dictionary& dict, const CMatrix& phi,
                        const SolverOptions& opts, const CMatrix& composed)
{
    return greedy(Algorithm::COMP, r_y, dict, phi, opts, composed);
}

CovarianceEstimate estimate(Algorithm alg, const CMatrix& r_y, const Dictionary& dict,
                            const CMatrix& phi, const SolverOptions& opts, const CMatrix& composed)
{
    return greedy(alg, r_y, dict, phi, opts, composed);
}

} // namespace ppcomp
