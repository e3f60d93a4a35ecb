#pragma once

// Exact maximum-weight matching on general graphs (Edmonds' blossom
// algorithm with dual variables, O(V^3)), and the minimum-weight perfect
// matching on a metric subset that Christofides needs.

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "modcover/budget.hpp"
#include "modcover/env_model.hpp"
#include "modcover/error.hpp"

namespace modcover {

struct WeightedEdge {
    std::size_t u = 0;
    std::size_t v = 0;
    double weight = 0.0;
};

namespace detail {

// Primal-dual blossom matcher. Edge k has endpoints 2k (u side) and 2k+1
// (v side); endpoint p belongs to vertex endpoint_[p] and p ^ 1 is the
// opposite end. Blossom ids are in [n, 2n).
class BlossomMatcher {
public:
    BlossomMatcher(std::size_t vertex_count, std::span<const WeightedEdge> edges, bool max_cardinality,
                   const Deadline& deadline)
        : n_(static_cast<long>(vertex_count)),
          edges_(edges.begin(), edges.end()),
          max_cardinality_(max_cardinality),
          deadline_(deadline) {}

    /// mate[v] = matched partner or -1.
    std::vector<long> solve() {
        const long n = n_;
        const long nedge = static_cast<long>(edges_.size());
        std::vector<long> result(static_cast<std::size_t>(n), -1);
        if (nedge == 0 || n == 0) return result;

        double max_weight = 0.0;
        for (const auto& e : edges_) max_weight = std::max(max_weight, e.weight);

        endpoint_.resize(2 * nedge);
        for (long p = 0; p < 2 * nedge; ++p) {
            const auto& e = edges_[p / 2];
            endpoint_[p] = static_cast<long>(p % 2 == 0 ? e.u : e.v);
        }
        neighbend_.assign(n, {});
        for (long k = 0; k < nedge; ++k) {
            neighbend_[edges_[k].u].push_back(2 * k + 1);
            neighbend_[edges_[k].v].push_back(2 * k);
        }
        mate_.assign(n, -1);
        label_.assign(2 * n, 0);
        labelend_.assign(2 * n, -1);
        inblossom_.resize(n);
        for (long v = 0; v < n; ++v) inblossom_[v] = v;
        blossomparent_.assign(2 * n, -1);
        blossomchilds_.assign(2 * n, {});
        blossombase_.assign(2 * n, -1);
        for (long v = 0; v < n; ++v) blossombase_[v] = v;
        blossomendps_.assign(2 * n, {});
        bestedge_.assign(2 * n, -1);
        blossombestedges_.assign(2 * n, {});
        has_bestedges_.assign(2 * n, 0);
        unusedblossoms_.clear();
        for (long b = 2 * n - 1; b >= n; --b) unusedblossoms_.push_back(b);
        dualvar_.assign(2 * n, 0.0);
        for (long v = 0; v < n; ++v) dualvar_[v] = max_weight;
        allowedge_.assign(nedge, 0);

        for (long stage = 0; stage < n; ++stage) {
            deadline_.check("blossom matching");
            std::fill(label_.begin(), label_.end(), 0);
            std::fill(bestedge_.begin(), bestedge_.end(), -1);
            for (long b = n; b < 2 * n; ++b) {
                blossombestedges_[b].clear();
                has_bestedges_[b] = 0;
            }
            std::fill(allowedge_.begin(), allowedge_.end(), 0);
            queue_.clear();
            for (long v = 0; v < n; ++v)
                if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);

            bool augmented = false;
            while (true) {
                while (!queue_.empty() && !augmented) {
                    const long v = queue_.back();
                    queue_.pop_back();
                    for (const long p : neighbend_[v]) {
                        const long k = p / 2;
                        const long w = endpoint_[p];
                        if (inblossom_[v] == inblossom_[w]) continue;
                        double kslack = 0.0;
                        if (!allowedge_[k]) {
                            kslack = slack(k);
                            if (kslack <= 0.0) allowedge_[k] = 1;
                        }
                        if (allowedge_[k]) {
                            if (label_[inblossom_[w]] == 0) {
                                assign_label(w, 2, p ^ 1);
                            } else if (label_[inblossom_[w]] == 1) {
                                const long base = scan_blossom(v, w);
                                if (base >= 0) {
                                    add_blossom(base, k);
                                } else {
                                    augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if (label_[w] == 0) {
                                label_[w] = 2;
                                labelend_[w] = p ^ 1;
                            }
                        } else if (label_[inblossom_[w]] == 1) {
                            const long b = inblossom_[v];
                            if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) bestedge_[b] = k;
                        } else if (label_[w] == 0) {
                            if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) bestedge_[w] = k;
                        }
                    }
                }
                if (augmented) break;

                // No augmenting path on tight edges: adjust duals.
                int deltatype = -1;
                double delta = 0.0;
                long deltaedge = -1;
                long deltablossom = -1;
                if (!max_cardinality_) {
                    deltatype = 1;
                    delta = *std::min_element(dualvar_.begin(), dualvar_.begin() + n);
                }
                for (long v = 0; v < n; ++v) {
                    if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
                        const double d = slack(bestedge_[v]);
                        if (deltatype == -1 || d < delta) {
                            delta = d;
                            deltatype = 2;
                            deltaedge = bestedge_[v];
                        }
                    }
                }
                for (long b = 0; b < 2 * n; ++b) {
                    if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
                        const double d = slack(bestedge_[b]) / 2.0;
                        if (deltatype == -1 || d < delta) {
                            delta = d;
                            deltatype = 3;
                            deltaedge = bestedge_[b];
                        }
                    }
                }
                for (long b = n; b < 2 * n; ++b) {
                    if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
                        (deltatype == -1 || dualvar_[b] < delta)) {
                        delta = dualvar_[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if (deltatype == -1) {
                    // Only reachable in max-cardinality mode: no further
                    // augmenting path exists.
                    deltatype = 1;
                    delta = std::max(0.0, *std::min_element(dualvar_.begin(), dualvar_.begin() + n));
                }

                for (long v = 0; v < n; ++v) {
                    if (label_[inblossom_[v]] == 1)
                        dualvar_[v] -= delta;
                    else if (label_[inblossom_[v]] == 2)
                        dualvar_[v] += delta;
                }
                for (long b = n; b < 2 * n; ++b) {
                    if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
                        if (label_[b] == 1)
                            dualvar_[b] += delta;
                        else if (label_[b] == 2)
                            dualvar_[b] -= delta;
                    }
                }

                if (deltatype == 1) {
                    break;
                } else if (deltatype == 2) {
                    allowedge_[deltaedge] = 1;
                    long i = static_cast<long>(edges_[deltaedge].u);
                    long j = static_cast<long>(edges_[deltaedge].v);
                    if (label_[inblossom_[i]] == 0) std::swap(i, j);
                    queue_.push_back(i);
                } else if (deltatype == 3) {
                    allowedge_[deltaedge] = 1;
                    queue_.push_back(static_cast<long>(edges_[deltaedge].u));
                } else {
                    expand_blossom(deltablossom, false);
                }
            }
            if (!augmented) break;

            for (long b = n; b < 2 * n; ++b) {
                if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 && dualvar_[b] == 0.0)
                    expand_blossom(b, true);
            }
        }

        for (long v = 0; v < n; ++v)
            if (mate_[v] >= 0) result[v] = endpoint_[mate_[v]];
        return result;
    }

private:
    double slack(long k) const {
        const auto& e = edges_[k];
        return dualvar_[e.u] + dualvar_[e.v] - 2.0 * e.weight;
    }

    std::vector<long> leaves(long b) const {
        std::vector<long> out;
        std::vector<long> stack{b};
        while (!stack.empty()) {
            const long t = stack.back();
            stack.pop_back();
            if (t < n_) {
                out.push_back(t);
            } else {
                const auto& ch = blossomchilds_[t];
                for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
            }
        }
        return out;
    }

    void assign_label(long w, int t, long p) {
        // Iterative form of the T -> S mate recursion.
        while (true) {
            const long b = inblossom_[w];
            label_[w] = label_[b] = t;
            labelend_[w] = labelend_[b] = p;
            bestedge_[w] = bestedge_[b] = -1;
            if (t == 1) {
                const auto lv = leaves(b);
                queue_.insert(queue_.end(), lv.begin(), lv.end());
                return;
            }
            const long base = blossombase_[b];
            if (mate_[base] < 0) throw InternalError("blossom matching: T-blossom base is unmatched");
            const long q = mate_[base];
            w = endpoint_[q];
            t = 1;
            p = q ^ 1;
        }
    }

    long scan_blossom(long v, long w) {
        std::vector<long> path;
        long base = -1;
        while (v != -1 || w != -1) {
            long b = inblossom_[v];
            if (label_[b] & 4) {
                base = blossombase_[b];
                break;
            }
            path.push_back(b);
            label_[b] = 5;
            if (labelend_[b] == -1) {
                v = -1;
            } else {
                v = endpoint_[labelend_[b]];
                b = inblossom_[v];
                v = endpoint_[labelend_[b]];
            }
            if (w != -1) std::swap(v, w);
        }
        for (const long b : path) label_[b] = 1;
        return base;
    }

    void add_blossom(long base, long k) {
        long v = static_cast<long>(edges_[k].u);
        long w = static_cast<long>(edges_[k].v);
        const long bb = inblossom_[base];
        long bv = inblossom_[v];
        long bw = inblossom_[w];
        const long b = unusedblossoms_.back();
        unusedblossoms_.pop_back();
        blossombase_[b] = base;
        blossomparent_[b] = -1;
        blossomparent_[bb] = b;
        auto& path = blossomchilds_[b];
        auto& endps = blossomendps_[b];
        path.clear();
        endps.clear();
        while (bv != bb) {
            blossomparent_[bv] = b;
            path.push_back(bv);
            endps.push_back(labelend_[bv]);
            v = endpoint_[labelend_[bv]];
            bv = inblossom_[v];
        }
        path.push_back(bb);
        std::reverse(path.begin(), path.end());
        std::reverse(endps.begin(), endps.end());
        endps.push_back(2 * k);
        while (bw != bb) {
            blossomparent_[bw] = b;
            path.push_back(bw);
            endps.push_back(labelend_[bw] ^ 1);
            w = endpoint_[labelend_[bw]];
            bw = inblossom_[w];
        }
        label_[b] = 1;
        labelend_[b] = labelend_[bb];
        dualvar_[b] = 0.0;
        for (const long leaf : leaves(b)) {
            if (label_[inblossom_[leaf]] == 2) queue_.push_back(leaf);
            inblossom_[leaf] = b;
        }

        std::vector<long> bestedgeto(2 * n_, -1);
        for (const long sub : path) {
            std::vector<long> candidates;
            if (!has_bestedges_[sub]) {
                for (const long leaf : leaves(sub))
                    for (const long p : neighbend_[leaf]) candidates.push_back(p / 2);
            } else {
                candidates = blossombestedges_[sub];
            }
            for (const long kk : candidates) {
                long i = static_cast<long>(edges_[kk].u);
                long j = static_cast<long>(edges_[kk].v);
                if (inblossom_[j] == b) std::swap(i, j);
                const long bj = inblossom_[j];
                if (bj != b && label_[bj] == 1 && (bestedgeto[bj] == -1 || slack(kk) < slack(bestedgeto[bj])))
                    bestedgeto[bj] = kk;
            }
            blossombestedges_[sub].clear();
            has_bestedges_[sub] = 0;
            bestedge_[sub] = -1;
        }
        auto& best = blossombestedges_[b];
        best.clear();
        for (const long kk : bestedgeto)
            if (kk != -1) best.push_back(kk);
        has_bestedges_[b] = 1;
        bestedge_[b] = -1;
        for (const long kk : best)
            if (bestedge_[b] == -1 || slack(kk) < slack(bestedge_[b])) bestedge_[b] = kk;
    }

    void expand_blossom(long b, bool endstage) {
        const std::vector<long> children = blossomchilds_[b];
        for (const long s : children) {
            blossomparent_[s] = -1;
            if (s < n_) {
                inblossom_[s] = s;
            } else if (endstage && dualvar_[s] == 0.0) {
                expand_blossom(s, endstage);
            } else {
                for (const long leaf : leaves(s)) inblossom_[leaf] = s;
            }
        }
        if (!endstage && label_[b] == 2) {
            const auto& childs = blossomchilds_[b];
            const auto& endps = blossomendps_[b];
            const long len = static_cast<long>(childs.size());
            const auto at = [&](const std::vector<long>& vec, long idx) { return vec[((idx % len) + len) % len]; };

            const long entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
            long j = static_cast<long>(std::find(childs.begin(), childs.end(), entrychild) - childs.begin());
            long jstep = 0;
            long endptrick = 0;
            if (j & 1) {
                j -= len;
                jstep = 1;
                endptrick = 0;
            } else {
                jstep = -1;
                endptrick = 1;
            }
            long p = labelend_[b];
            while (j != 0) {
                label_[endpoint_[p ^ 1]] = 0;
                label_[endpoint_[at(endps, j - endptrick) ^ endptrick ^ 1]] = 0;
                assign_label(endpoint_[p ^ 1], 2, p);
                allowedge_[at(endps, j - endptrick) / 2] = 1;
                j += jstep;
                p = at(endps, j - endptrick) ^ endptrick;
                allowedge_[p / 2] = 1;
                j += jstep;
            }
            long bv = at(childs, j);
            label_[endpoint_[p ^ 1]] = label_[bv] = 2;
            labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
            bestedge_[bv] = -1;
            j += jstep;
            while (at(childs, j) != entrychild) {
                bv = at(childs, j);
                if (label_[bv] == 1) {
                    j += jstep;
                    continue;
                }
                long found = -1;
                for (const long leaf : leaves(bv)) {
                    if (label_[leaf] != 0) {
                        found = leaf;
                        break;
                    }
                }
                if (found != -1) {
                    label_[found] = 0;
                    label_[endpoint_[mate_[blossombase_[bv]]]] = 0;
                    assign_label(found, 2, labelend_[found]);
                }
                j += jstep;
            }
        }
        label_[b] = -1;
        labelend_[b] = -1;
        blossomchilds_[b].clear();
        blossomendps_[b].clear();
        blossombase_[b] = -1;
        blossombestedges_[b].clear();
        has_bestedges_[b] = 0;
        bestedge_[b] = -1;
        unusedblossoms_.push_back(b);
    }

    void augment_blossom(long b, long v) {
        long t = v;
        while (blossomparent_[t] != b) t = blossomparent_[t];
        if (t >= n_) augment_blossom(t, v);
        auto& childs = blossomchilds_[b];
        auto& endps = blossomendps_[b];
        const long len = static_cast<long>(childs.size());
        const auto at = [&](const std::vector<long>& vec, long idx) { return vec[((idx % len) + len) % len]; };

        const long i = static_cast<long>(std::find(childs.begin(), childs.end(), t) - childs.begin());
        long j = i;
        long jstep = 0;
        long endptrick = 0;
        if (i & 1) {
            j -= len;
            jstep = 1;
            endptrick = 0;
        } else {
            jstep = -1;
            endptrick = 1;
        }
        while (j != 0) {
            j += jstep;
            t = at(childs, j);
            const long p = at(endps, j - endptrick) ^ endptrick;
            if (t >= n_) augment_blossom(t, endpoint_[p]);
            j += jstep;
            t = at(childs, j);
            if (t >= n_) augment_blossom(t, endpoint_[p ^ 1]);
            mate_[endpoint_[p]] = p ^ 1;
            mate_[endpoint_[p ^ 1]] = p;
        }
        std::rotate(childs.begin(), childs.begin() + i, childs.end());
        std::rotate(endps.begin(), endps.begin() + i, endps.end());
        blossombase_[b] = blossombase_[childs[0]];
    }

    void augment_matching(long k) {
        const long v = static_cast<long>(edges_[k].u);
        const long w = static_cast<long>(edges_[k].v);
        const std::pair<long, long> sides[2] = {{v, 2 * k + 1}, {w, 2 * k}};
        for (auto [s, p] : sides) {
            while (true) {
                const long bs = inblossom_[s];
                if (bs >= n_) augment_blossom(bs, s);
                mate_[s] = p;
                if (labelend_[bs] == -1) break;
                const long t = endpoint_[labelend_[bs]];
                const long bt = inblossom_[t];
                s = endpoint_[labelend_[bt]];
                const long j = endpoint_[labelend_[bt] ^ 1];
                if (bt >= n_) augment_blossom(bt, j);
                mate_[j] = labelend_[bt];
                p = labelend_[bt] ^ 1;
            }
        }
    }

    long n_;
    std::vector<WeightedEdge> edges_;
    bool max_cardinality_;
    Deadline deadline_;

    std::vector<long> endpoint_;
    std::vector<std::vector<long>> neighbend_;
    std::vector<long> mate_;
    std::vector<int> label_;
    std::vector<long> labelend_;
    std::vector<long> inblossom_;
    std::vector<long> blossomparent_;
    std::vector<std::vector<long>> blossomchilds_;
    std::vector<long> blossombase_;
    std::vector<std::vector<long>> blossomendps_;
    std::vector<long> bestedge_;
    std::vector<std::vector<long>> blossombestedges_;
    std::vector<char> has_bestedges_;
    std::vector<long> unusedblossoms_;
    std::vector<double> dualvar_;
    std::vector<char> allowedge_;
    std::vector<long> queue_;
};

}  // namespace detail

/// Maximum-weight matching; with `max_cardinality`, the heaviest among the
/// maximum-cardinality matchings. Returns mate[v] (-1 when unmatched).
inline std::vector<long> max_weight_matching(std::size_t vertex_count, std::span<const WeightedEdge> edges,
                                             bool max_cardinality = false,
                                             const Deadline& deadline = Deadline::none()) {
    for (const auto& e : edges)
        if (e.u >= vertex_count || e.v >= vertex_count || e.u == e.v)
            throw InvalidInput("max_weight_matching: bad edge endpoints");
    return detail::BlossomMatcher(vertex_count, edges, max_cardinality, deadline).solve();
}

/// Minimum-weight perfect matching of the vertices in `subset` under metric
/// `d`. Pairs are returned as original vertex ids, smaller id first, sorted.
inline std::vector<std::pair<std::size_t, std::size_t>> min_weight_perfect_matching(
    const DistanceMatrix& d, std::span<const std::size_t> subset, const Deadline& deadline = Deadline::none()) {
    const auto k = subset.size();
    if (k % 2 != 0) throw InternalError("min_weight_perfect_matching: odd number of vertices");
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (k == 0) return pairs;

    double max_w = 0.0;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) max_w = std::max(max_w, d(subset[a], subset[b]));
    // Complementing against a constant above every weight turns "heaviest
    // perfect matching" into "lightest perfect matching" on a complete graph.
    const double shift = max_w + 1.0;
    std::vector<WeightedEdge> edges;
    edges.reserve(k * (k - 1) / 2);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) edges.push_back({a, b, shift - d(subset[a], subset[b])});

    const auto mate = detail::BlossomMatcher(k, edges, true, deadline).solve();
    for (std::size_t a = 0; a < k; ++a) {
        if (mate[a] < 0) throw InternalError("min_weight_perfect_matching: matching is not perfect");
        const auto b = static_cast<std::size_t>(mate[a]);
        if (a < b) pairs.emplace_back(std::min(subset[a], subset[b]), std::max(subset[a], subset[b]));
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

}  // namespace modcover
