#pragma once

#include <utility>
#include <vector>

#include "mgn/rational.hpp"

namespace mgn::detail {

// (value, multiplicity) pairs of a sorted multiset.
inline std::vector<std::pair<int, int>> run_lengths(const std::vector<int>& sorted) {
    std::vector<std::pair<int, int>> runs;
    for (int v : sorted) {
        if (!runs.empty() && runs.back().first == v)
            ++runs.back().second;
        else
            runs.emplace_back(v, 1);
    }
    return runs;
}

// Visits every sub-multiset once with its selection count prod C(mult_i, take_i).
// fn(sub, ways, |sub|, sum(sub)).
template <typename F>
void for_each_submultiset(const std::vector<std::pair<int, int>>& runs, F&& fn) {
    std::vector<int> take(runs.size(), 0);
    for (;;) {
        std::vector<int> sub;
        Integer ways{1};
        long long sum = 0;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            for (int c = 0; c < take[i]; ++c)
                sub.push_back(runs[i].first);
            ways *= binomial(runs[i].second, take[i]);
            sum += static_cast<long long>(take[i]) * runs[i].first;
        }
        fn(sub, ways, static_cast<int>(sub.size()), sum);
        std::size_t i = 0;
        while (i < runs.size() && take[i] == runs[i].second)
            take[i++] = 0;
        if (i == runs.size())
            break;
        ++take[i];
    }
}

inline std::vector<int> multiset_complement(const std::vector<std::pair<int, int>>& runs,
                                            const std::vector<int>& sub) {
    std::vector<int> out;
    auto sub_runs = run_lengths(sub);
    for (const auto& [v, mult] : runs) {
        int used = 0;
        for (const auto& [sv, sm] : sub_runs)
            if (sv == v)
                used = sm;
        for (int c = 0; c < mult - used; ++c)
            out.push_back(v);
    }
    return out;
}

}  // namespace mgn::detail
