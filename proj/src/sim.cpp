#include "retro/sim.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>

#include "retro/retrodiction.hpp"
#include "retro/rng.hpp"

namespace retro::sim {

namespace {

using Table = std::vector<std::vector<std::uint64_t>>;

std::size_t draw(const std::vector<long double>& cdf, double u) {
    for (std::size_t k = 0; k + 1 < cdf.size(); ++k)
        if (static_cast<long double>(u) < cdf[k]) return k;
    return cdf.size() - 1;
}

std::vector<long double> cumulate(std::vector<long double> p) {
    long double acc = 0.0L;
    for (auto& x : p) {
        acc += x;
        x = acc;
    }
    p.back() = 1.0L;
    return p;
}

double three_sigma(double p, std::uint64_t trials) {
    return 3.0 * std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
}

EmpiricalEntry entry(Quantity q, std::size_t i, std::size_t j, std::uint64_t hits,
                     std::uint64_t trials, double analytic) {
    const double empirical = static_cast<double>(hits) / static_cast<double>(trials);
    const double deviation = std::abs(empirical - analytic);
    const double bound = three_sigma(analytic, trials);
    return {q, i, j, trials, empirical, analytic, deviation, bound, deviation > bound};
}

}  // namespace

std::uint64_t SampleCounts::prepared(std::size_t i) const {
    std::uint64_t s = 0;
    for (auto c : counts.at(i)) s += c;
    return s;
}

std::uint64_t SampleCounts::observed(std::size_t j) const {
    std::uint64_t s = 0;
    for (const auto& row : counts) s += row.at(j);
    return s;
}

std::uint64_t SampleCounts::sum() const {
    std::uint64_t s = 0;
    for (const auto& row : counts)
        for (auto c : row) s += c;
    return s;
}

std::vector<std::vector<long double>> outcome_cdfs(const Ensemble& e, const Povm& povm) {
    if (e.dim() != povm.dim()) throw DimensionMismatch(e.dim(), povm.dim(), "sampling");
    std::vector<std::vector<long double>> cdfs;
    for (const auto& rho : e.states()) {
        std::vector<long double> p;
        for (const auto& effect : povm.elements()) {
            long double acc = 0.0L;
            const auto& a = effect.matrix();
            const auto& b = rho.matrix();
            for (std::size_t r = 0; r < a.dim(); ++r)
                for (std::size_t c = 0; c < a.dim(); ++c) {
                    const auto x = a(r, c), y = b(c, r);
                    acc += static_cast<long double>(x.real()) * y.real() -
                           static_cast<long double>(x.imag()) * y.imag();
                }
            clamp_probability(static_cast<double>(acc), "Tr(Pi_j rho_i)");
            p.push_back(std::clamp(acc, 0.0L, 1.0L));
        }
        cdfs.push_back(cumulate(std::move(p)));
    }
    return cdfs;
}

SampleCounts sample(const Ensemble& e, const Povm& povm, std::uint64_t n, std::uint64_t seed,
                    unsigned workers) {
    if (n == 0) throw InvalidParameter("sample count must be at least 1");
    const auto cdfs = outcome_cdfs(e, povm);
    std::vector<long double> priors(e.priors().begin(), e.priors().end());
    const auto prior_cdf = cumulate(std::move(priors));

    const std::uint64_t shards = (n + kShardSize - 1) / kShardSize;
    const Table zero(e.size(), std::vector<std::uint64_t>(povm.size(), 0));
    std::vector<Table> shard_counts(shards, zero);

    auto run_shard = [&](std::uint64_t k) {
        SplitMix64 rng(seed ^ k);
        const std::uint64_t begin = k * kShardSize;
        const std::uint64_t end = std::min(n, begin + kShardSize);
        Table& t = shard_counts[k];
        for (std::uint64_t trial = begin; trial < end; ++trial) {
            const std::size_t i = draw(prior_cdf, rng.uniform());
            const std::size_t j = draw(cdfs[i], rng.uniform());
            ++t[i][j];
        }
    };

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, shards));
    if (workers <= 1) {
        for (std::uint64_t k = 0; k < shards; ++k) run_shard(k);
    } else {
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < workers; ++w)
            threads.emplace_back([&, w] {
                for (std::uint64_t k = w; k < shards; k += workers) run_shard(k);
            });
        for (auto& t : threads) t.join();
    }

    SampleCounts out{n, zero, seed, SplitMix64::kName};
    for (const auto& t : shard_counts)
        for (std::size_t i = 0; i < t.size(); ++i)
            for (std::size_t j = 0; j < t[i].size(); ++j) out.counts[i][j] += t[i][j];
    return out;
}

const char* to_string(Quantity q) {
    switch (q) {
        case Quantity::forward: return "P(b_j|a_i)";
        case Quantity::backward: return "P(a_i|b_j)";
        case Quantity::marginal: return "mu_j";
    }
    return "?";
}

std::size_t EmpiricalReport::flagged() const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [](const EmpiricalEntry& e) { return e.flagged; }));
}

EmpiricalReport empirical_report(const SampleCounts& counts, const Ensemble& e, const Povm& povm) {
    if (counts.counts.size() != e.size() || counts.counts.front().size() != povm.size())
        throw InvalidParameter("sample counts do not match the ensemble and POVM");
    if (counts.sum() != counts.n_total) throw InvalidParameter("sample counts do not sum to n_total");

    std::optional<RetroDual> dual;
    try {
        dual = retro_transform(e, povm);
    } catch (const SingularOperator&) {
    }

    EmpiricalReport report;
    report.backward_from_symmetric = dual.has_value();
    const OutcomeDistribution mu = outcome_probs(povm, source_from_ensemble(e));

    for (std::size_t j = 0; j < povm.size(); ++j)
        report.entries.push_back(
            entry(Quantity::marginal, 0, j, counts.observed(j), counts.n_total, mu[j]));

    for (std::size_t i = 0; i < e.size(); ++i) {
        const std::uint64_t trials = counts.prepared(i);
        if (trials == 0) continue;
        for (std::size_t j = 0; j < povm.size(); ++j)
            report.entries.push_back(entry(Quantity::forward, i, j, counts.counts[i][j], trials,
                                           predictive_prob(povm[j], e.states()[i])));
    }

    for (std::size_t j = 0; j < povm.size(); ++j) {
        const std::uint64_t trials = counts.observed(j);
        if (trials == 0) continue;
        for (std::size_t i = 0; i < e.size(); ++i) {
            const double analytic = dual && dual->retro_states[j]
                                        ? retrodictive_prob_symmetric(*dual, i, j)
                                        : retrodictive_prob_bayes(e, povm, i, j);
            report.entries.push_back(
                entry(Quantity::backward, i, j, counts.counts[i][j], trials, analytic));
        }
    }
    return report;
}

}  // namespace retro::sim
