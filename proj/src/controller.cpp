#include "rwfault/controller.hpp"

#include "rwfault/attitude_math.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rwfault {

// ---------------------------------------------------------------------------
// HistoryStack

HistoryStack::HistoryStack(int n_wheels, int capacity, double lambda_bar)
    : n_wheels_(n_wheels), capacity_(capacity), lambda_bar_(lambda_bar),
      fe_matrix_(MatX::Zero(n_wheels, n_wheels))
{
    pairs_.reserve(static_cast<size_t>(capacity));
}

HistoryStack::Score HistoryStack::score(const MatX& m)
{
    Score s;
    if (m.rows() == 0)
        return s;
    Eigen::SelfAdjointEigenSolver<MatX> eig(m, Eigen::EigenvaluesOnly);
    const VecX& ev = eig.eigenvalues();
    const double top = std::max(ev.maxCoeff(), 0.0);
    // Eigenvalues below the round-off floor count as zero.
    const double floor = 1e-10 * top;
    s.lambda_min = ev.minCoeff() > floor ? ev.minCoeff() : 0.0;
    s.rank = static_cast<int>((ev.array() > floor).count());
    if (top == 0.0)
        s.rank = 0;
    s.trace = m.trace();
    return s;
}

bool HistoryStack::better(const Score& a, const Score& b)
{
    if (a.lambda_min != b.lambda_min)
        return a.lambda_min > b.lambda_min;
    if (a.rank != b.rank)
        return a.rank > b.rank;
    return a.trace > b.trace;
}

void HistoryStack::refresh()
{
    fe_matrix_ = MatX::Zero(n_wheels_, n_wheels_);
    for (const auto& p : pairs_)
        fe_matrix_.noalias() += p.script_y.transpose() * p.script_y;
    score_ = score(fe_matrix_);
    lambda_min_ = score_.lambda_min;
}

bool HistoryStack::insert(const IclPair& pair, double now)
{
    if (capacity_ <= 0)
        return false;

    bool stored = false;
    if (static_cast<int>(pairs_.size()) < capacity_) {
        pairs_.push_back(pair);
        stored = true;
    } else {
        const MatX candidate = pair.script_y.transpose() * pair.script_y;
        int best = -1;
        Score best_score = score_;
        for (size_t j = 0; j < pairs_.size(); ++j) {
            const MatX trial =
                fe_matrix_ - pairs_[j].script_y.transpose() * pairs_[j].script_y + candidate;
            const Score s = score(trial);
            if (better(s, best_score) && s.lambda_min >= score_.lambda_min) {
                best_score = s;
                best = static_cast<int>(j);
            }
        }
        if (best >= 0) {
            pairs_[static_cast<size_t>(best)] = pair;
            stored = true;
        }
    }

    if (stored) {
        const double previous = lambda_min_;
        refresh();
        // Rebuilding from scratch can lose the last ulp; keep the sequence monotone.
        lambda_min_ = std::max(lambda_min_, previous);
        if (!fe_time_ && lambda_min_ >= lambda_bar_)
            fe_time_ = now;
    }
    return stored;
}

VecX HistoryStack::icl_sum(const VecX& theta_hat) const
{
    VecX sum = VecX::Zero(n_wheels_);
    for (const auto& p : pairs_)
        sum.noalias() += p.script_y.transpose() * p.residual(theta_hat);
    return sum;
}

FeStatus fe_status(const HistoryStack& stack)
{
    return {stack.lambda_min(), stack.fe_satisfied(), stack.fe_time()};
}

// ---------------------------------------------------------------------------
// Control law

namespace control {

Vec3 filtered_error(const Mrp& sigma_e, const Vec3& sigma_e_dot, const Mat3& alpha)
{
    return sigma_e_dot + alpha * sigma_e.vec();
}

TrackingError tracking_error(const PlantState& state, const ReferenceSample& ref, const Mat3& alpha)
{
    TrackingError e;
    e.sigma_e = attitude::mrp_error(state.sigma, ref.sigma_d);
    e.r_tilde = attitude::r_tilde(e.sigma_e);
    e.omega_tilde = state.omega - e.r_tilde * ref.omega_d;
    e.b = attitude::b_matrix(e.sigma_e);
    e.sigma_e_dot = 0.25 * e.b * e.omega_tilde;
    e.r = filtered_error(e.sigma_e, e.sigma_e_dot, alpha);
    return e;
}

namespace {

Vec3 auxiliary_from_error(const TrackingError& e, const PlantState& state, const ReferenceSample& ref,
                          const ControllerGains& gains, const RwaConfig& cfg)
{
    const Mat3& j = cfg.j_body;
    const Vec3& w = state.omega;
    const Vec3 h = j * w + cfg.j_rw * (cfg.g * state.wheel_speeds);
    const Mat3 b_dot = attitude::b_matrix_dot(e.sigma_e, e.sigma_e_dot);
    const Vec3 inner = -0.25 * b_dot * e.omega_tilde - gains.alpha * e.sigma_e_dot - gains.k * e.r
        - gains.beta * e.sigma_e.vec();
    return w.cross(h) + j * e.r_tilde * ref.omega_d_dot
        - j * e.omega_tilde.cross(e.r_tilde * ref.omega_d)
        + 4.0 * j * attitude::b_matrix_inverse(e.sigma_e) * inner;
}

} // namespace

Vec3 auxiliary_control(const PlantState& state, const ReferenceSample& ref, const ControllerGains& gains,
                       const RwaConfig& cfg)
{
    return auxiliary_from_error(tracking_error(state, ref, gains.alpha), state, ref, gains, cfg);
}

Mat3X regressor(const VecX& u, const Mat3X& g)
{
    return g * u.asDiagonal();
}

Allocation allocate(const Vec3& u_d, const VecX& theta_hat, const Mat3X& g)
{
    Allocation a;
    a.u = VecX::Zero(g.cols());

    // Wheels estimated as dead get exactly zero torque.
    std::vector<Eigen::Index> live;
    for (Eigen::Index i = 0; i < g.cols(); ++i)
        if (theta_hat(i) != 0.0)
            live.push_back(i);
    if (live.empty()) {
        a.controllability_loss = true;
        return a;
    }

    MatX m(3, static_cast<Eigen::Index>(live.size()));
    for (size_t j = 0; j < live.size(); ++j)
        m.col(static_cast<Eigen::Index>(j)) = theta_hat(live[j]) * g.col(live[j]);

    Eigen::JacobiSVD<MatX> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VecX& sv = svd.singularValues();
    const double tol = 1e-10 * sv(0);
    VecX coeffs = svd.matrixU().transpose() * u_d;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol && sv(i) > 0.0) {
            coeffs(i) /= sv(i);
            ++a.rank;
        } else {
            coeffs(i) = 0.0;
        }
    }
    const VecX u_live = svd.matrixV() * coeffs;
    for (size_t j = 0; j < live.size(); ++j)
        a.u(live[j]) = u_live(static_cast<Eigen::Index>(j));
    a.controllability_loss = a.rank < 3;
    return a;
}

std::optional<IclPair> icl_accumulate(std::span<const IclSample> samples, double t_i, double delta_t,
                                      const RwaConfig& cfg)
{
    constexpr double time_tol = 1e-6;
    const double t_start = t_i - delta_t;
    auto find = [&](double t) -> std::optional<size_t> {
        for (size_t k = 0; k < samples.size(); ++k)
            if (std::abs(samples[k].t - t) <= time_tol)
                return k;
        return std::nullopt;
    };
    const auto first = find(t_start);
    const auto last = find(t_i);
    if (!first || !last || *last <= *first)
        return std::nullopt;

    const int n = cfg.n_wheels();
    auto gyro = [&](const IclSample& s) -> Vec3 {
        return s.omega.cross(cfg.j_body * s.omega + cfg.j_rw * (cfg.g * s.wheel_speeds));
    };

    IclPair pair;
    pair.script_y = Mat3X::Zero(3, n);
    pair.script_u = Vec3::Zero();
    pair.t_i = t_i;
    for (size_t k = *first; k < *last; ++k) {
        const IclSample& a = samples[k];
        const IclSample& b = samples[k + 1];
        if (a.y.cols() != n)
            return std::nullopt;
        const double h = b.t - a.t;
        pair.script_y += h * a.y;
        pair.script_u += 0.5 * h * (gyro(a) + gyro(b));
    }
    pair.delta_h = cfg.j_body * (samples[*last].omega - samples[*first].omega);
    return pair;
}

VecX adaptation_step(const VecX& theta_hat, const Vec3& r, const Mat3& b, const Mat3X& y,
                     const HistoryStack& stack, const ControllerGains& gains, const RwaConfig& cfg, double dt)
{
    const Mat3 j_inv = cfg.j_body.inverse();
    VecX rate = 0.25 * gains.gamma * y.transpose() * j_inv.transpose() * b.transpose() * r;
    if (!stack.pairs().empty() && gains.k1.squaredNorm() > 0.0)
        rate += gains.gamma * gains.k1 * stack.icl_sum(theta_hat);
    return (theta_hat + dt * rate).cwiseMax(gains.theta_min).cwiseMin(gains.theta_max);
}

double lyapunov(const Vec3& r, const Mrp& sigma_e, const VecX& theta_tilde, double beta, const MatX& gamma)
{
    const double estimation = theta_tilde.size() > 0 ? theta_tilde.dot(gamma.ldlt().solve(theta_tilde)) : 0.0;
    return 0.5 * r.squaredNorm() + 0.5 * beta * sigma_e.squaredNorm() + 0.5 * estimation;
}

} // namespace control

// ---------------------------------------------------------------------------
// AdaptiveController

AdaptiveController::AdaptiveController(RwaConfig cfg, ControllerGains gains, VecX theta_init)
    : cfg_(std::move(cfg)), gains_(std::move(gains)), theta_hat_(std::move(theta_init)),
      stack_(cfg_.n_wheels(), gains_.n_s, gains_.lambda_bar)
{
}

AdaptiveController::Output AdaptiveController::compute(const PlantState& state, const ReferenceSample& ref,
                                                       double dt)
{
    Output out;
    out.error = control::tracking_error(state, ref, gains_.alpha);
    out.u_d = control::auxiliary_from_error(out.error, state, ref, gains_, cfg_);

    const long window = std::max(1L, std::lround(gains_.delta_t / dt));
    samples_.push_back({state.time, state.omega, state.wheel_speeds, Mat3X()});
    while (static_cast<long>(samples_.size()) > window + 1)
        samples_.pop_front();
    if (step_count_ >= window && step_count_ % window == 0) {
        const std::vector<IclSample> buf(samples_.begin(), samples_.end());
        const double span = buf.back().t - buf.front().t;
        if (auto pair = control::icl_accumulate(buf, state.time, span, cfg_))
            stack_.insert(*pair, state.time);
    }

    const Allocation alloc = control::allocate(out.u_d, theta_hat_, cfg_.g);
    out.u_commanded = alloc.u;
    out.u_applied = plant::saturate_torque(alloc.u, cfg_);
    out.y = control::regressor(out.u_applied, cfg_.g);
    out.controllability_loss = alloc.controllability_loss;
    if (alloc.controllability_loss)
        ++controllability_loss_events_;

    samples_.back().y = out.y;
    ++step_count_;
    return out;
}

void AdaptiveController::adapt(const Output& out, double dt)
{
    theta_hat_ = control::adaptation_step(theta_hat_, out.error.r, out.error.b, out.y, stack_, gains_, cfg_, dt);
}

} // namespace rwfault
