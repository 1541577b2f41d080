#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "hdyn/errors.hpp"

namespace hdyn {

/// Integer partition stored as a nondecreasing list of positive parts.
/// The empty partition is the unique partition of 0.
class Partition {
public:
    Partition() = default;

    explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
        for (int p : parts_)
            if (p <= 0) throw ValidationError("partition parts must be positive");
        std::sort(parts_.begin(), parts_.end());
    }

    const std::vector<int>& parts() const { return parts_; }
    int total() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }
    std::size_t length() const { return parts_.size(); }
    bool empty() const { return parts_.empty(); }

    /// Number of parts equal to `value`.
    int multiplicity(int value) const {
        return static_cast<int>(std::count(parts_.begin(), parts_.end(), value));
    }

    /// "(1,2)"; the empty partition prints as "()".
    std::string to_string() const {
        std::string s = "(";
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(parts_[i]);
        }
        return s + ")";
    }

    auto operator<=>(const Partition&) const = default;

private:
    std::vector<int> parts_;
};

namespace detail {

// Can the multiset `fine` (sorted descending) be split into groups with sums `targets`?
// Places the largest remaining fine part first; identical targets are tried once.
inline bool assign_parts(const std::vector<int>& fine, std::size_t idx, std::vector<int>& remaining) {
    if (idx == fine.size())
        return std::all_of(remaining.begin(), remaining.end(), [](int r) { return r == 0; });
    for (std::size_t j = 0; j < remaining.size(); ++j) {
        if (remaining[j] < fine[idx]) continue;
        bool seen = false;
        for (std::size_t i = 0; i < j; ++i)
            if (remaining[i] == remaining[j]) { seen = true; break; }
        if (seen) continue;
        remaining[j] -= fine[idx];
        bool ok = assign_parts(fine, idx + 1, remaining);
        remaining[j] += fine[idx];
        if (ok) return true;
    }
    return false;
}

} // namespace detail

/// Refinement order: `fine <= coarse` iff the parts of `fine` can be grouped so that the
/// group sums are exactly the parts of `coarse`.
inline bool refines(const Partition& fine, const Partition& coarse) {
    if (fine.total() != coarse.total()) return false;
    if (fine.length() < coarse.length()) return false;
    static thread_local std::map<std::pair<Partition, Partition>, bool> memo;
    auto key = std::make_pair(fine, coarse);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::vector<int> f(fine.parts().rbegin(), fine.parts().rend());
    std::vector<int> remaining = coarse.parts();
    bool ok = detail::assign_parts(f, 0, remaining);
    memo.emplace(std::move(key), ok);
    return ok;
}

/// All partitions of n, in lexicographic order of their sorted part lists.
inline std::vector<Partition> partitions_of(int n) {
    std::vector<Partition> out;
    if (n < 0) return out;
    if (n == 0) return {Partition{}};
    std::vector<int> current;
    auto rec = [&](auto&& self, int remaining, int min_part) -> void {
        if (remaining == 0) {
            out.emplace_back(current);
            return;
        }
        for (int p = min_part; p <= remaining; ++p) {
            current.push_back(p);
            self(self, remaining - p, p);
            current.pop_back();
        }
    };
    rec(rec, n, 1);
    std::sort(out.begin(), out.end());
    return out;
}

/// A partition of k is realizable on M_{0,N} when it has at most N-k-2 parts.
inline bool realizable(const Partition& lambda, int n) {
    return static_cast<int>(lambda.length()) <= n - lambda.total() - 2;
}

} // namespace hdyn
