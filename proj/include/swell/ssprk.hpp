#pragma once

// Strong-stability-preserving Runge-Kutta methods written as convex
// combinations of forward-Euler-type steps:
//   u(s) = sum_k w_sk * [ tau_sk > 0 ? H_{tau_sk dt}(u(k)) : u(k) ].

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace swell {

struct SsprkTerm {
    int source = 0;      // 0 is u^n, s is the s-th stage
    double weight = 0.0;
    double tau = 0.0;    // step fraction; 0 means the stage value itself
};

struct SsprkMethod {
    std::string label;
    int order = 0;
    std::vector<std::vector<SsprkTerm>> stages;  // the last stage is u^{n+1}
};

inline SsprkMethod ssprk22() {
    return {"SSPRK22", 2, {{{0, 1.0, 1.0}}, {{0, 0.5, 0.0}, {1, 0.5, 1.0}}}};
}

inline SsprkMethod ssprk33() {
    return {"SSPRK33",
            3,
            {{{0, 1.0, 1.0}},
             {{0, 0.75, 0.0}, {1, 0.25, 1.0}},
             {{0, 1.0 / 3.0, 0.0}, {2, 2.0 / 3.0, 1.0}}}};
}

/// Five-stage fourth-order method of Spiteri and Ruuth.
inline SsprkMethod ssprk54() {
    const double a20 = 0.444370493651235, a21 = 0.555629506348765, b21 = 0.368410593050371;
    const double a30 = 0.620101851488403, a32 = 0.379898148511597, b32 = 0.251891774271694;
    const double a40 = 0.178079954393132, a43 = 0.821920045606868, b43 = 0.544974750228521;
    const double a52 = 0.517231671970585, a53 = 0.096059710526147, b53 = 0.063692468666290;
    const double a54 = 0.386708617503269, b54 = 0.226007483236906;
    return {"SSPRK54",
            4,
            {{{0, 1.0, 0.391752226571890}},
             {{0, a20, 0.0}, {1, a21, b21 / a21}},
             {{0, a30, 0.0}, {2, a32, b32 / a32}},
             {{0, a40, 0.0}, {3, a43, b43 / a43}},
             {{2, a52, 0.0}, {3, a53, b53 / a53}, {4, a54, b54 / a54}}}};
}

/// Method matched to reconstruction degree.
inline SsprkMethod ssprk_select(int degree) {
    if (degree < 0) throw std::invalid_argument("negative degree");
    if (degree <= 1) return ssprk22();
    if (degree == 2) return ssprk33();
    return ssprk54();
}

/// One step. apply(u, tau_dt) is the single-step operator; combine takes a
/// list of (weight, pointer) pairs and returns their linear combination.
template <class V, class Apply, class Combine>
V ssprk_step(const SsprkMethod& m, double dt, const V& un, Apply&& apply, Combine&& combine) {
    std::vector<V> u;
    u.reserve(m.stages.size() + 1);
    u.push_back(un);
    for (const auto& stage : m.stages) {
        std::vector<V> applied;
        applied.reserve(stage.size());
        std::vector<std::pair<double, const V*>> terms;
        for (const auto& t : stage) {
            if (t.tau > 0.0) {
                applied.push_back(apply(u[t.source], t.tau * dt));
                terms.push_back({t.weight, nullptr});
            } else {
                terms.push_back({t.weight, &u[t.source]});
            }
        }
        std::size_t next = 0;
        for (auto& t : terms)
            if (!t.second) t.second = &applied[next++];
        if (terms.size() == 1 && terms[0].first == 1.0)
            u.push_back(*terms[0].second);
        else
            u.push_back(combine(terms));
    }
    return std::move(u.back());
}

}  // namespace swell
