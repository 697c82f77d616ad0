#include "wbomd/langevin.hpp"

#include "wbomd/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace wbomd {

namespace {

void validate(const LangevinParams& p)
{
    if (!(p.friction > 0.0))
        throw std::invalid_argument("LangevinParams: friction must be > 0");
    if (!(p.temperature > 0.0))
        throw std::invalid_argument("LangevinParams: temperature must be > 0");
    if (!(p.dt > 0.0))
        throw std::invalid_argument("LangevinParams: dt must be > 0");
    if (p.burn_in < 0 || p.steps <= p.burn_in)
        throw std::invalid_argument("LangevinParams: need steps > burn_in >= 0");
    if (p.batches < 20)
        throw std::invalid_argument("LangevinParams: need at least 20 batches for "
                                    "batch-means error bars");
    if ((p.steps - p.burn_in) < p.batches)
        throw std::invalid_argument("LangevinParams: fewer post-burn-in samples than batches");
}

// One Langevin path; record(z) is called once per post-burn-in step.
template <typename Record>
void run_path(const MatrixPotential& pot, int surface, const LangevinParams& params,
              PhasePoint z0, std::uint64_t stream, Record&& record)
{
    validate(params);
    CounterRng rng(params.seed, stream);
    const double dt = params.dt;
    const double damp = std::exp(-params.friction * dt);
    const double noise = std::sqrt(params.temperature * (1.0 - damp * damp));

    double x = z0.x, p = z0.p;
    double force = pot.surface_force(x, surface);
    for (long s = 0; s < params.steps; ++s) {
        p += 0.5 * dt * force;
        x += 0.5 * dt * p;
        p = damp * p + noise * rng.next_normal();
        x += 0.5 * dt * p;
        force = pot.surface_force(x, surface);
        p += 0.5 * dt * force;
        if (!std::isfinite(x) || !std::isfinite(p))
            throw NumericalError("langevin path diverged at step " + std::to_string(s));
        if (s >= params.burn_in)
            record(PhasePoint{x, p});
    }
}

// Batch-means statistics over a fixed number of equal-size batches; trailing
// samples that do not fill a complete batch are dropped.
class BatchMeans {
public:
    BatchMeans(long samples, int batches)
        : batch_len_(samples / batches), batches_(batches)
    {
        means_.reserve(batches);
    }

    void add(double v)
    {
        if (static_cast<long>(means_.size()) == batches_)
            return; // trailing partial batch
        acc_ += v;
        acc_sq_ += v * v;
        if (++count_ == batch_len_) {
            means_.push_back(acc_ / batch_len_);
            sum_ += acc_;
            sum_sq_ += acc_sq_;
            acc_ = acc_sq_ = 0.0;
            count_ = 0;
        }
    }

    ErgodicEstimate finalize() const
    {
        const long used = batch_len_ * batches_;
        ErgodicEstimate est;
        est.samples = used;
        double m = 0.0;
        for (double b : means_)
            m += b;
        m /= batches_;
        est.mean = m;
        double var_bm = 0.0;
        for (double b : means_)
            var_bm += (b - m) * (b - m);
        var_bm /= (batches_ - 1);
        est.std_error = std::sqrt(var_bm / batches_);
        const double var_sample = sum_sq_ / used - m * m;
        est.effective_samples = est.std_error > 0.0
                                    ? var_sample / (est.std_error * est.std_error)
                                    : static_cast<double>(used);
        return est;
    }

private:
    long batch_len_;
    int batches_;
    long count_ = 0;
    double acc_ = 0.0, acc_sq_ = 0.0;
    double sum_ = 0.0, sum_sq_ = 0.0;
    std::vector<double> means_;
};

} // namespace

ErgodicEstimate langevin_average(const MatrixPotential& pot, int surface,
                                 const std::function<double(PhasePoint)>& observable,
                                 const LangevinParams& params, PhasePoint z0,
                                 std::uint64_t stream)
{
    if (!observable)
        throw std::invalid_argument("langevin_average: observable required");
    BatchMeans stats(params.steps - params.burn_in, params.batches);
    run_path(pot, surface, params, z0, stream,
             [&](PhasePoint z) { stats.add(observable(z)); });
    return stats.finalize();
}

WeightEstimate estimate_weights_groundstate(const MatrixPotential& pot, double temperature,
                                            const LangevinParams& params, PhasePoint z0,
                                            std::uint64_t stream)
{
    if (!(temperature > 0.0))
        throw std::invalid_argument("estimate_weights_groundstate: temperature must be > 0");
    LangevinParams run = params;
    run.temperature = temperature;
    validate(run);

    const int d = pot.dim();
    const long samples = run.steps - run.burn_in;
    const long batch_len = samples / run.batches;

    // Per-batch accumulation of the d relative-occupation factors; each batch
    // yields a normalized weight vector, and the spread of those vectors gives
    // the error bar.
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
    long count = 0;
    std::vector<Eigen::VectorXd> batch_q;
    batch_q.reserve(run.batches);

    run_path(pot, 1, run, z0, stream, [&](PhasePoint z) {
        if (static_cast<long>(batch_q.size()) == run.batches)
            return;
        const Eigen::VectorXd lam = pot.eigenvalues(z.x);
        for (int j = 0; j < d; ++j)
            acc[j] += std::exp(-(lam[j] - lam[0]) / temperature);
        if (++count == batch_len) {
            batch_q.push_back(acc / acc.sum());
            acc.setZero();
            count = 0;
        }
    });

    WeightEstimate est;
    est.q = Eigen::VectorXd::Zero(d);
    for (const auto& b : batch_q)
        est.q += b;
    est.q /= run.batches;
    est.std_error = Eigen::VectorXd::Zero(d);
    for (const auto& b : batch_q)
        est.std_error += (b - est.q).cwiseAbs2();
    est.std_error = (est.std_error / ((run.batches - 1.0) * run.batches)).cwiseSqrt();
    return est;
}

MatrixPotential merged_potential(const MatrixPotential& pot, double temperature)
{
    if (!(temperature > 0.0))
        throw std::invalid_argument("merged_potential: temperature must be > 0");

    auto merged = [pot, temperature](double x) {
        const Eigen::VectorXd lam = pot.eigenvalues(x);
        const double m = lam.minCoeff();
        double sum = 0.0;
        for (int j = 0; j < lam.size(); ++j)
            sum += std::exp(-(lam[j] - m) / temperature);
        return m - temperature * std::log(sum);
    };
    auto derivative = [pot, temperature](double x) {
        const Eigen::VectorXd lam = pot.eigenvalues(x);
        const double m = lam.minCoeff();
        double norm = 0.0, acc = 0.0;
        for (int j = 0; j < lam.size(); ++j) {
            const double w = std::exp(-(lam[j] - m) / temperature);
            norm += w;
            acc += w * (-pot.surface_force(x, j + 1)); // d lambda_j / dx
        }
        return acc / norm;
    };
    return MatrixPotential::scalar(std::move(merged), std::move(derivative));
}

ErgodicEstimate merged_path_average(const MatrixPotential& pot, double temperature,
                                    const std::function<double(PhasePoint)>& observable,
                                    const LangevinParams& params, PhasePoint z0,
                                    std::uint64_t stream)
{
    LangevinParams run = params;
    run.temperature = temperature;
    const MatrixPotential merged = merged_potential(pot, temperature);
    return langevin_average(merged, 1, observable, run, z0, stream);
}

} // namespace wbomd
