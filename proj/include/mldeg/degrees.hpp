#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mldeg/errors.hpp"
#include "mldeg/involution.hpp"
#include "mldeg/likelihood.hpp"
#include "mldeg/unipoly.hpp"

namespace mldeg {

enum class Quantity { ml_bidegree, sectional, master, degree };

inline const char* to_string(Quantity q) {
    switch (q) {
    case Quantity::ml_bidegree: return "ml_bidegree";
    case Quantity::sectional: return "sectional_ml_degree";
    case Quantity::master: return "master_bidegree";
    case Quantity::degree: return "degree";
    }
    return "?";
}

struct ComputeOptions {
    /// Number of independent seeds that must agree on every count.
    std::size_t agreement = 3;
    unsigned threads = 1;
};

/// One solve of one count.
struct RunDiagnostics {
    std::uint64_t seed = 0;
    std::size_t count = 0;
    std::size_t paths = 0;
    std::size_t bezout = 0;
    std::size_t nonsingular = 0;
    std::size_t junk = 0; ///< nonsingular solutions rejected by the validity predicates
    std::size_t singular = 0;
    std::size_t diverged = 0;
    std::size_t failed = 0;
    std::size_t duplicates = 0;
    std::size_t retracked = 0;
};

/// A count repeated under the agreement protocol.
struct CountRecord {
    Quantity quantity = Quantity::ml_bidegree;
    std::size_t index = 0;
    std::size_t value = 0;
    bool agreed = false;
    std::vector<RunDiagnostics> runs;
};

/// Thrown when the seeds of the agreement protocol produce different counts.
class SeedDisagreement : public Error {
public:
    explicit SeedDisagreement(std::vector<CountRecord> records)
        : Error(describe(records)), records_(std::move(records)) {}

    const std::vector<CountRecord>& records() const noexcept { return records_; }

private:
    static std::string describe(const std::vector<CountRecord>& records) {
        std::string msg = "seed disagreement";
        for (const auto& r : records) {
            if (r.agreed) continue;
            msg += std::string("; ") + to_string(r.quantity) + "[" + std::to_string(r.index) + "] counts";
            for (const auto& run : r.runs) msg += " " + std::to_string(run.count);
        }
        return msg;
    }

    std::vector<CountRecord> records_;
};

namespace detail {

inline std::uint64_t stream_for(Quantity q, std::size_t index) {
    return (static_cast<std::uint64_t>(q) + 1) * 0x10000ULL + index;
}

inline std::vector<Rational> random_data(std::size_t len, RandomSource& rng) {
    std::vector<Rational> v;
    for (std::size_t i = 0; i < len; ++i) v.push_back(rng.balanced_rational());
    return v;
}

inline CriticalProblem build_for(const ModelSpec& model, Quantity q, std::size_t i, RandomSource& rng) {
    switch (q) {
    case Quantity::ml_bidegree: {
        auto base = build_likelihood_critical(model, random_data(model.n() + 1, rng), rng);
        return i == 0 ? base : add_slices(base, SliceMode::bidegree, i, i, rng);
    }
    case Quantity::sectional: {
        auto base = build_likelihood_critical(model, random_data(model.n() + 1, rng), rng);
        return i == 0 ? base : add_slices(base, SliceMode::sectional, i, 0, rng);
    }
    case Quantity::master: {
        auto base = build_master_critical(model, random_data(model.n(), rng), rng);
        return i == 0 ? base : add_slices(base, SliceMode::bidegree, i, i, rng);
    }
    case Quantity::degree: return build_degree_problem(model, rng);
    }
    throw InternalError("unknown quantity");
}

} // namespace detail

/// Single solve of one count with one seed.
inline RunDiagnostics run_count(const ModelSpec& model, Quantity q, std::size_t index, std::uint64_t seed,
                                unsigned threads = 1) {
    RandomSource rng(seed, detail::stream_for(q, index));
    RandomSource build_rng = rng.derive(1);
    const CriticalProblem problem = detail::build_for(model, q, index, build_rng);
    TrackerConfig cfg = model.tolerances.tracker;
    cfg.threads = threads;
    const SolveOutcome out = solve_and_count(problem, cfg, rng.derive(2));
    RunDiagnostics d;
    d.seed = seed;
    d.count = out.valid;
    d.paths = out.solutions.paths;
    d.bezout = out.solutions.bezout;
    d.nonsingular = out.solutions.nonsingular;
    d.junk = out.solutions.nonsingular - out.valid;
    d.singular = out.solutions.singular;
    d.diverged = out.solutions.diverged;
    d.failed = out.solutions.failed;
    d.duplicates = out.solutions.duplicates;
    d.retracked = out.solutions.retracked;
    return d;
}

/// Repeats a count with seeds model.seed, model.seed + 1, ...; never throws on disagreement.
inline CountRecord count_with_agreement(const ModelSpec& model, Quantity q, std::size_t index,
                                        const ComputeOptions& opts) {
    if (opts.agreement == 0) throw ConfigError("agreement needs at least one seed");
    CountRecord rec;
    rec.quantity = q;
    rec.index = index;
    for (std::size_t r = 0; r < opts.agreement; ++r)
        rec.runs.push_back(run_count(model, q, index, model.seed + r, opts.threads));
    rec.value = rec.runs.front().count;
    rec.agreed = true;
    for (const auto& run : rec.runs)
        if (run.count != rec.value) rec.agreed = false;
    return rec;
}

inline void require_agreement(const std::vector<CountRecord>& records) {
    for (const auto& r : records)
        if (!r.agreed) throw SeedDisagreement(records);
}

inline std::vector<CountRecord> count_series(const ModelSpec& model, Quantity q, const ComputeOptions& opts) {
    model.validate();
    std::vector<CountRecord> out;
    for (std::size_t i = 0; i <= model.dim; ++i) out.push_back(count_with_agreement(model, q, i, opts));
    return out;
}

inline std::vector<std::size_t> values_of(const std::vector<CountRecord>& records) {
    std::vector<std::size_t> v;
    for (const auto& r : records) v.push_back(r.value);
    return v;
}

inline std::size_t ml_degree(const ModelSpec& model, const ComputeOptions& opts = {}) {
    model.validate();
    const auto rec = count_with_agreement(model, Quantity::ml_bidegree, 0, opts);
    require_agreement({rec});
    return rec.value;
}

inline std::vector<std::size_t> ml_bidegrees(const ModelSpec& model, const ComputeOptions& opts = {}) {
    const auto recs = count_series(model, Quantity::ml_bidegree, opts);
    require_agreement(recs);
    return values_of(recs);
}

inline std::vector<std::size_t> sectional_ml_degrees(const ModelSpec& model, const ComputeOptions& opts = {}) {
    const auto recs = count_series(model, Quantity::sectional, opts);
    require_agreement(recs);
    return values_of(recs);
}

/// Number of points of Y on a generic affine subspace of codimension dim Y.
inline std::size_t degree_of_variety(const ModelSpec& model, const ComputeOptions& opts = {}) {
    model.validate();
    const auto rec = count_with_agreement(model, Quantity::degree, 0, opts);
    require_agreement({rec});
    return rec.value;
}

/// (sum_i c_i p^(d-i) u^i) p^(n-d)
inline BiPoly assemble_bipoly(const std::vector<std::size_t>& c, std::uint32_t n, std::uint32_t d) {
    if (c.size() != static_cast<std::size_t>(d) + 1)
        throw DomainError("coefficient vector has length " + std::to_string(c.size()) + ", expected d + 1 = " +
                          std::to_string(d + 1));
    if (d > n) throw DomainError("dimension d exceeds ambient n");
    BiPoly out;
    for (std::uint32_t i = 0; i <= d; ++i) out.add(n - i, i, Rational(static_cast<unsigned long>(c[i])));
    return out;
}

inline BiPoly assemble_B(const std::vector<std::size_t>& b, std::uint32_t n, std::uint32_t d) {
    return assemble_bipoly(b, n, d);
}

inline BiPoly assemble_S(const std::vector<std::size_t>& s, std::uint32_t n, std::uint32_t d) {
    return assemble_bipoly(s, n, d);
}

/// Conjectured B-polynomial of the rank-one 2x...x2 tensors of order k:
/// p^n + sum_i i! C(k,i) p^(n-i) u^i with n = 2^k - 1.
inline BiPoly conjectured_B_tensor(std::uint32_t k) {
    if (k == 0 || k > 30) throw DomainError("tensor order must be in 1..30");
    const std::uint32_t n = (1U << k) - 1;
    BiPoly out;
    out.add(n, 0, Rational(1));
    Integer falling = 1; // k (k-1) ... (k-i+1) = i! C(k,i)
    for (std::uint32_t i = 1; i <= k; ++i) {
        falling *= k - i + 1;
        out.add(n - i, i, Rational(falling));
    }
    return out;
}

struct DegreeReport {
    std::uint32_t n = 0;
    std::uint32_t d = 0;
    std::vector<std::size_t> b;
    std::vector<std::size_t> s;
    std::optional<BiPoly> B;
    std::optional<BiPoly> S;
    std::optional<std::size_t> degree; ///< independent count of deg Y
    std::vector<CountRecord> records;
};

struct DegreeRequest {
    bool bidegrees = true;
    bool sectional = true;
    bool degree = false;
};

/// Runs the requested series; throws SeedDisagreement (carrying every record) on any disagreement.
inline DegreeReport compute_degrees(const ModelSpec& model, const DegreeRequest& req, const ComputeOptions& opts = {}) {
    model.validate();
    DegreeReport rep;
    rep.n = static_cast<std::uint32_t>(model.n());
    rep.d = static_cast<std::uint32_t>(model.dim);
    if (req.bidegrees) {
        auto recs = count_series(model, Quantity::ml_bidegree, opts);
        rep.b = values_of(recs);
        rep.records.insert(rep.records.end(), recs.begin(), recs.end());
    }
    if (req.sectional) {
        auto recs = count_series(model, Quantity::sectional, opts);
        rep.s = values_of(recs);
        rep.records.insert(rep.records.end(), recs.begin(), recs.end());
    }
    if (req.degree) {
        auto rec = count_with_agreement(model, Quantity::degree, 0, opts);
        rep.degree = rec.value;
        rep.records.push_back(rec);
    }
    require_agreement(rep.records);
    if (req.bidegrees) rep.B = assemble_B(rep.b, rep.n, rep.d);
    if (req.sectional) rep.S = assemble_S(rep.s, rep.n, rep.d);
    return rep;
}

struct MasterReport {
    std::uint32_t n = 0;
    std::uint32_t d = 0;
    std::vector<std::size_t> v;
    /// Coefficient of [P^i] in the Chern-Mather class: (-1)^(d-i) v_i.
    std::vector<long long> cMa;
    std::vector<CountRecord> records;
};

inline std::vector<long long> chern_mather_from_master(const std::vector<std::size_t>& v) {
    const std::size_t d = v.empty() ? 0 : v.size() - 1;
    std::vector<long long> c;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto value = static_cast<long long>(v[i]);
        c.push_back((d - i) % 2 == 0 ? value : -value);
    }
    return c;
}

inline MasterReport master_bidegrees(const ModelSpec& model, const ComputeOptions& opts = {}) {
    MasterReport rep;
    rep.n = static_cast<std::uint32_t>(model.n());
    rep.d = static_cast<std::uint32_t>(model.dim);
    rep.records = count_series(model, Quantity::master, opts);
    require_agreement(rep.records);
    rep.v = values_of(rep.records);
    rep.cMa = chern_mather_from_master(rep.v);
    return rep;
}

} // namespace mldeg
