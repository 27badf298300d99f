#ifndef QFPNET_COMPLEXITY_HPP
#define QFPNET_COMPLEXITY_HPP

// Communication-complexity accounting and partition counting.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qfpnet/core.hpp"

namespace qfpnet {

// Sum over runs and senders of alpha^2 * log2(n), in qubits.
inline double q_total(std::span<const RunConfig> runs, std::uint64_t n) {
    if (n < 2) throw DomainError("q_total: n must be >= 2");
    const double l = std::log2(static_cast<double>(n));
    double photons = 0.0;
    for (const auto& r : runs)
        for (double a : r.alphas) photons += a * a;
    return photons * l;
}

inline double q_total(const std::vector<RunConfig>& runs, std::uint64_t n) {
    return q_total(std::span<const RunConfig>(runs.data(), runs.size()), n);
}

// Best known classical protocol for the all-equality function.
inline double classical_optimal_ae(std::uint64_t n, int parties, double p_e) {
    if (!(p_e > 0.0 && p_e < 1.0)) throw DomainError("classical_optimal_ae: P_e must lie in (0, 1)");
    if (n < 1 || parties < 1) throw DomainError("classical_optimal_ae: n and N must be positive");
    const double reps = std::ceil(std::log2(p_e) / std::log2(1.0 - (1.0 - std::exp(-0.5)) / 9.0));
    const std::uint64_t three_n = 3 * n;
    const auto np = static_cast<std::uint64_t>(parties);
    const std::uint64_t block = (three_n + np - 1) / np;  // ceil(3n/N)
    const double per_party = 8.0 * std::sqrt(2.0 * static_cast<double>(block)) +
                             4.0 * std::ceil(std::log2(static_cast<double>(three_n) / static_cast<double>(block)));
    return static_cast<double>(parties) * reps * per_party;
}

// Classical lower limit for the all-equality function. May be negative for
// large P_e.
inline double classical_limit_ae(std::uint64_t n, int parties, double p_e) {
    if (!(p_e >= 0.0 && p_e < 1.0)) throw DomainError("classical_limit_ae: P_e must lie in [0, 1)");
    if (parties < 1) throw DomainError("classical_limit_ae: N must be positive");
    const double big_n = static_cast<double>(parties);
    return big_n * ((1.0 - 2.0 * std::sqrt(p_e)) * std::sqrt(static_cast<double>(n)) /
                        (2.0 * std::sqrt(big_n * std::log(2.0))) -
                    1.0 / big_n);
}

struct ComplexityReport {
    double q_ae = 0.0;
    double q_r = 0.0;
    double c_o_ae = 0.0;
    double c_l_ae = 0.0;
    bool ordering_satisfied = false;  // q_r < c_l_ae < c_o_ae
};

inline ComplexityReport complexity_report(double q_ae, double q_r, std::uint64_t n, int parties, double p_e) {
    ComplexityReport r{q_ae, q_r, classical_optimal_ae(n, parties, p_e), classical_limit_ae(n, parties, p_e), false};
    r.ordering_satisfied = r.q_r < r.c_l_ae && r.c_l_ae < r.c_o_ae;
    return r;
}

inline std::uint64_t binomial_coefficient(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

namespace detail {

inline void check_case_range(int n, int i, int j) {
    if (n < 1 || j < 1 || j > n) throw DomainError("count_cases: need 1 <= j <= N");
    const int lo = (n + j - 1) / j;
    if (i < lo || i > n - (j - 1)) throw DomainError("count_cases: i outside [ceil(N/j), N-(j-1)]");
}

}  // namespace detail

// Number of relationships of N inputs with j groups whose largest group has
// exactly i members: sum over group-size profiles i = N_1 >= N_2 >= ... >= N_j
// of the multinomial count divided by s_G, the product of factorial(r) over
// every size shared by r groups.
inline std::uint64_t count_cases(int n, int i, int j) {
    detail::check_case_range(n, i, j);
    std::uint64_t total = 0;
    std::vector<int> sizes{i};
    std::function<void(int, int)> rec = [&](int remaining, int cap) {
        const int placed = static_cast<int>(sizes.size());
        if (placed == j) {
            if (remaining != 0) return;
            std::uint64_t ways = 1;
            int left = n;
            for (int s : sizes) {
                ways *= binomial_coefficient(static_cast<std::uint64_t>(left), static_cast<std::uint64_t>(s));
                left -= s;
            }
            std::uint64_t s_g = 1;
            for (std::size_t a = 0; a < sizes.size();) {
                std::size_t b = a;
                while (b < sizes.size() && sizes[b] == sizes[a]) ++b;
                for (std::uint64_t f = 2; f <= b - a; ++f) s_g *= f;
                a = b;
            }
            total += ways / s_g;
            return;
        }
        const int groups_left = j - placed;
        for (int s = std::min(cap, remaining - (groups_left - 1)); s >= 1; --s) {
            if (s * groups_left < remaining) break;
            sizes.push_back(s);
            rec(remaining - s, s);
            sizes.pop_back();
        }
    };
    rec(n - i, i);
    return total;
}

// Same quantity by direct enumeration of all set partitions.
inline std::uint64_t count_cases_enumerated(int n, int i, int j) {
    detail::check_case_range(n, i, j);
    std::uint64_t total = 0;
    for (const auto& rel : enumerate_relationships(n)) {
        const auto sizes = rel.group_sizes();
        if (static_cast<int>(sizes.size()) == j && sizes.front() == i) ++total;
    }
    return total;
}

}  // namespace qfpnet

#endif
