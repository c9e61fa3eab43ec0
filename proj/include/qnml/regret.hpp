#pragma once

// Multinomial NML parametric complexity reg(N, r) = ln C(N, r).

#include <qnml/error.hpp>
#include <qnml/numeric.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qnml {

enum class RegretMethod {
    exact,        ///< finite-sum representation of C(N, r), O(N)
    szp_small_r,  ///< Szpankowski expansion for fixed r, growing N
    szp_all_range ///< Szpankowski-Weinberger approximation, any N and r
};

inline std::string_view to_string(RegretMethod m) {
    switch (m) {
        case RegretMethod::exact: return "exact";
        case RegretMethod::szp_small_r: return "szp1";
        case RegretMethod::szp_all_range: return "szp2";
    }
    return "?";
}

inline RegretMethod parse_regret_method(std::string_view s) {
    if (s == "exact") return RegretMethod::exact;
    if (s == "szp1" || s == "szp-small-r") return RegretMethod::szp_small_r;
    if (s == "szp2" || s == "szp-all-range") return RegretMethod::szp_all_range;
    detail::data_error("unknown regret method '" + std::string(s) + "'");
}

namespace detail {
inline void check_arity(std::uint64_t r) {
    if (r == 0) data_error("regret needs at least one category");
}
}  // namespace detail

/// ln C(N, k) with C(N, k) = Σ_{l=0}^{N-1} (N-1)^(l falling) k^(l+1 rising) / (N^(l+1) l!).
///
/// Consecutive terms differ by the factor (N-l)(k+l)/(N l), so the sum is
/// accumulated from term logarithms.
inline double regret_exact(std::uint64_t N, std::uint64_t r) {
    detail::check_arity(r);
    if (N == 0 || r == 1) return 0.0;
    const double n = static_cast<double>(N);
    const double k = static_cast<double>(r);
    const double log_n = std::log(n);
    double log_term = std::log(k) - log_n;  // l = 0
    double acc = log_term;
    for (std::uint64_t l = 1; l < N; ++l) {
        const double dl = static_cast<double>(l);
        log_term += std::log1p(-dl / n) + std::log1p(k / dl);
        acc = numeric::log_add(acc, log_term);
    }
    return acc;
}

/// Five-term Szpankowski expansion; degrades when r is large relative to N.
inline double regret_szp_small_r(std::uint64_t N, std::uint64_t r) {
    detail::check_arity(r);
    if (N == 0) detail::data_error("szp1 regret needs N >= 1");
    if (r == 1) return 0.0;
    const double n = static_cast<double>(N);
    const double k = static_cast<double>(r);
    // Γ(r/2) / Γ((r-1)/2)
    const double ratio = numeric::gamma_half_ratio((k - 1.0) / 2.0);
    return std::sqrt(2.0) * k * ratio / (3.0 * std::sqrt(n))
         + (k - 1.0) / 2.0 * std::log(n / 2.0)
         - std::lgamma(k / 2.0) + 0.5 * std::log(std::numbers::pi)
         - k * k * ratio * ratio / (9.0 * n)
         + (2.0 * k * k * k - 3.0 * k * k - 2.0 * k + 3.0) / (36.0 * n);
}

/// Szpankowski-Weinberger approximation with α = r/N and
/// C_α = 1/2 + 1/2 sqrt(1 + 4/α).
inline double regret_szp_all_range(std::uint64_t N, std::uint64_t r) {
    detail::check_arity(r);
    if (N == 0) detail::data_error("szp2 regret needs N >= 1");
    const double alpha = static_cast<double>(r) / static_cast<double>(N);
    const double root = std::sqrt(1.0 + 4.0 / alpha);
    const double c_alpha = 0.5 + 0.5 * root;
    // ln C_α via log1p: C_α - 1 = (2/α) / (1 + root) is tiny when α is huge.
    const double log_c = std::log1p((2.0 / alpha) / (1.0 + root));
    const double n = static_cast<double>(N);
    return n * (std::log(alpha) + (alpha + 2.0) * log_c - 1.0 / c_alpha)
         - 0.5 * std::log(c_alpha + 2.0 / alpha);
}

/// Literal enumeration of Σ over {1..r}^N of the maximized likelihood.
/// Test oracle; refuses r^N > 2^24.
inline double regret_bruteforce_oracle(std::uint64_t N, std::uint64_t r) {
    detail::check_arity(r);
    std::uint64_t total = 1;
    for (std::uint64_t t = 0; t < N; ++t)
        if (!numeric::mul_bounded(total, r, std::uint64_t{1} << 24, total))
            detail::resource_error("brute-force regret limited to r^N <= 2^24");
    std::vector<std::uint64_t> counts(r, 0);
    double sum = 0.0;
    for (std::uint64_t code = 0; code < total; ++code) {
        std::fill(counts.begin(), counts.end(), 0);
        std::uint64_t c = code;
        for (std::uint64_t t = 0; t < N; ++t) {
            ++counts[c % r];
            c /= r;
        }
        double log_p = 0.0;
        for (auto m : counts)
            if (m) log_p += static_cast<double>(m) * std::log(static_cast<double>(m) / static_cast<double>(N));
        sum += std::exp(log_p);
    }
    return std::log(sum);
}

inline double regret(RegretMethod m, std::uint64_t N, std::uint64_t r) {
    if (N == 0) {
        detail::check_arity(r);
        return 0.0;
    }
    switch (m) {
        case RegretMethod::exact: return regret_exact(N, r);
        case RegretMethod::szp_small_r: return regret_szp_small_r(N, r);
        case RegretMethod::szp_all_range: return regret_szp_all_range(N, r);
    }
    return 0.0;
}

/// Memoized regret values for one method. Lookups are thread safe;
/// concurrent inserts of the same key store identical values.
class RegretCache {
public:
    explicit RegretCache(RegretMethod method = RegretMethod::szp_all_range) : method_(method) {}

    RegretMethod method() const noexcept { return method_; }

    double operator()(std::uint64_t N, std::uint64_t r) const {
        if (N == 0 || r == 1) {
            detail::check_arity(r);
            return 0.0;
        }
        const Key key{N, r};
        {
            std::shared_lock lock(mutex_);
            if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        }
        const double v = regret(method_, N, r);
        std::unique_lock lock(mutex_);
        memo_[key] = v;
        return v;
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return memo_.size();
    }

private:
    struct Key {
        std::uint64_t n, r;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept {
            return std::hash<std::uint64_t>{}(k.n * 0x9E3779B97F4A7C15ull ^ k.r);
        }
    };

    RegretMethod method_;
    mutable std::shared_mutex mutex_;
    mutable std::unordered_map<Key, double, KeyHash> memo_;
};

}  // namespace qnml
