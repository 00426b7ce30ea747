#include "groupnoise/transport.hpp"

#include "groupnoise/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace groupnoise {

namespace {

class Dinic {
public:
    explicit Dinic(std::size_t nodes) : head_(nodes, -1), level_(nodes), it_(nodes) {}

    void add_edge(int u, int v, std::int64_t cap) {
        edges_.push_back({v, head_[static_cast<std::size_t>(u)], cap});
        head_[static_cast<std::size_t>(u)] = static_cast<int>(edges_.size() - 1);
        edges_.push_back({u, head_[static_cast<std::size_t>(v)], 0});
        head_[static_cast<std::size_t>(v)] = static_cast<int>(edges_.size() - 1);
    }

    std::int64_t max_flow(int s, int t) {
        std::int64_t flow = 0;
        while (bfs(s, t)) {
            for (std::size_t i = 0; i < head_.size(); ++i) it_[i] = head_[i];
            while (std::int64_t f = dfs(s, t, std::numeric_limits<std::int64_t>::max())) flow += f;
        }
        return flow;
    }

private:
    struct Edge {
        int to;
        int next;
        std::int64_t cap;
    };

    bool bfs(int s, int t) {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<int> q;
        level_[static_cast<std::size_t>(s)] = 0;
        q.push(s);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (int e = head_[static_cast<std::size_t>(u)]; e != -1; e = edges_[static_cast<std::size_t>(e)].next) {
                const Edge& E = edges_[static_cast<std::size_t>(e)];
                if (E.cap > 0 && level_[static_cast<std::size_t>(E.to)] < 0) {
                    level_[static_cast<std::size_t>(E.to)] = level_[static_cast<std::size_t>(u)] + 1;
                    q.push(E.to);
                }
            }
        }
        return level_[static_cast<std::size_t>(t)] >= 0;
    }

    std::int64_t dfs(int u, int t, std::int64_t pushed) {
        if (u == t) return pushed;
        for (int& e = it_[static_cast<std::size_t>(u)]; e != -1; e = edges_[static_cast<std::size_t>(e)].next) {
            Edge& E = edges_[static_cast<std::size_t>(e)];
            if (E.cap <= 0 || level_[static_cast<std::size_t>(E.to)] != level_[static_cast<std::size_t>(u)] + 1)
                continue;
            if (std::int64_t f = dfs(E.to, t, std::min(pushed, E.cap))) {
                E.cap -= f;
                edges_[static_cast<std::size_t>(e ^ 1)].cap += f;
                return f;
            }
        }
        return 0;
    }

    std::vector<Edge> edges_;
    std::vector<int> head_, level_, it_;
};

// Successive shortest paths with Dijkstra on reduced costs.
class MinCostFlow {
public:
    explicit MinCostFlow(std::size_t nodes) : graph_(nodes) {}

    void add_edge(int u, int v, std::int64_t cap, double cost) {
        graph_[static_cast<std::size_t>(u)].push_back({v, cap, cost, graph_[static_cast<std::size_t>(v)].size()});
        graph_[static_cast<std::size_t>(v)].push_back({u, 0, -cost, graph_[static_cast<std::size_t>(u)].size() - 1});
    }

    // Returns (flow, cost * flow units).
    std::pair<std::int64_t, long double> run(int s, int t) {
        const std::size_t n = graph_.size();
        std::vector<double> potential(n, 0.0), dist(n);
        std::vector<int> prev_node(n);
        std::vector<std::size_t> prev_edge(n);
        std::int64_t flow = 0;
        long double cost = 0.0L;
        constexpr double inf = std::numeric_limits<double>::infinity();
        for (;;) {
            std::fill(dist.begin(), dist.end(), inf);
            using Item = std::pair<double, int>;
            std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
            dist[static_cast<std::size_t>(s)] = 0.0;
            pq.push({0.0, s});
            while (!pq.empty()) {
                auto [d, u] = pq.top();
                pq.pop();
                const auto uu = static_cast<std::size_t>(u);
                if (d > dist[uu]) continue;
                for (std::size_t i = 0; i < graph_[uu].size(); ++i) {
                    const Arc& a = graph_[uu][i];
                    if (a.cap <= 0) continue;
                    const auto vv = static_cast<std::size_t>(a.to);
                    const double reduced = std::max(0.0, a.cost + potential[uu] - potential[vv]);
                    if (dist[uu] + reduced < dist[vv]) {
                        dist[vv] = dist[uu] + reduced;
                        prev_node[vv] = u;
                        prev_edge[vv] = i;
                        pq.push({dist[vv], a.to});
                    }
                }
            }
            if (dist[static_cast<std::size_t>(t)] == inf) break;
            for (std::size_t v = 0; v < n; ++v)
                if (dist[v] < inf) potential[v] += dist[v];
            std::int64_t push = std::numeric_limits<std::int64_t>::max();
            for (int v = t; v != s; v = prev_node[static_cast<std::size_t>(v)]) {
                const auto vv = static_cast<std::size_t>(v);
                push = std::min(push, graph_[static_cast<std::size_t>(prev_node[vv])][prev_edge[vv]].cap);
            }
            for (int v = t; v != s; v = prev_node[static_cast<std::size_t>(v)]) {
                const auto vv = static_cast<std::size_t>(v);
                Arc& a = graph_[static_cast<std::size_t>(prev_node[vv])][prev_edge[vv]];
                a.cap -= push;
                graph_[vv][a.rev].cap += push;
                cost += static_cast<long double>(push) * a.cost;
            }
            flow += push;
        }
        return {flow, cost};
    }

private:
    struct Arc {
        int to;
        std::int64_t cap;
        double cost;
        std::size_t rev;
    };
    std::vector<std::vector<Arc>> graph_;
};

void check_instance(const TransportInstance& inst, std::size_t limit) {
    require_same_group(*inst.first.group(), *inst.second.group());
    if (!inst.distance) throw ConfigError("transport instance without a distance");
    if (inst.quantization < 1'000'000'000) throw ConfigError("quantization factor must be >= 1e9");
    const std::size_t atoms = inst.first.size() + inst.second.size();
    if (atoms > limit) throw BudgetExceeded("transport support too large", 0, atoms);
}

double checked_distance(const TransportInstance& inst, const Element& x, const Element& y) {
    const double d = inst.distance(x, y);
    if (!std::isfinite(d) || d < 0.0) throw Error("distance callback returned an invalid value");
    return d;
}

}  // namespace

DistanceFn word_metric(GroupPtr group) {
    return [group](const Element& a, const Element& b) { return static_cast<double>(group->distance(a, b)); };
}

DistanceFn sum_metric(GroupPtr product) {
    if (product->kind() != GroupKind::Product) throw SpecMismatch(product->name() + " is not a product");
    return [product](const Element& a, const Element& b) {
        auto [a1, a2] = product->split(a);
        auto [b1, b2] = product->split(b);
        return static_cast<double>(product->first()->distance(a1, b1) + product->second()->distance(a2, b2));
    };
}

std::vector<std::int64_t> quantize(const SparseMeasure& xi, std::int64_t scale) {
    const auto& atoms = xi.atoms();
    std::vector<std::int64_t> q(atoms.size());
    std::vector<std::pair<long double, std::size_t>> remainder(atoms.size());
    std::int64_t used = 0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const long double exact = static_cast<long double>(atoms[i].second) * scale;
        q[i] = static_cast<std::int64_t>(std::floor(exact));
        remainder[i] = {exact - static_cast<long double>(q[i]), i};
        used += q[i];
    }
    std::stable_sort(remainder.begin(), remainder.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::int64_t left = scale - used;
    for (std::size_t k = 0; left > 0 && !remainder.empty(); k = (k + 1) % remainder.size(), --left)
        ++q[remainder[k].second];
    for (std::size_t k = remainder.size(); left < 0 && k-- > 0;) {
        const std::size_t i = remainder[k].second;
        const std::int64_t take = std::min<std::int64_t>(q[i], -left);
        q[i] -= take;
        left += take;
    }
    return q;
}

double u_s_exact(const TransportInstance& inst) {
    check_instance(inst, kMaxFlowAtoms);
    const auto& a = inst.first.atoms();
    const auto& b = inst.second.atoms();
    const auto qa = quantize(inst.first, inst.quantization);
    const auto qb = quantize(inst.second, inst.quantization);
    const int na = static_cast<int>(a.size()), nb = static_cast<int>(b.size());
    const int source = na + nb, sink = source + 1;
    Dinic flow(static_cast<std::size_t>(sink + 1));
    for (int i = 0; i < na; ++i) flow.add_edge(source, i, qa[static_cast<std::size_t>(i)]);
    for (int j = 0; j < nb; ++j) flow.add_edge(na + j, sink, qb[static_cast<std::size_t>(j)]);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j)
            if (checked_distance(inst, a[static_cast<std::size_t>(i)].first, b[static_cast<std::size_t>(j)].first) < inst.s)
                flow.add_edge(i, na + j, std::min(qa[static_cast<std::size_t>(i)], qb[static_cast<std::size_t>(j)]));
    const std::int64_t routed = flow.max_flow(source, sink);
    return static_cast<double>(inst.quantization - routed) / static_cast<double>(inst.quantization);
}

double w1_exact(const TransportInstance& inst) {
    check_instance(inst, kMinCostAtoms);
    const auto& a = inst.first.atoms();
    const auto& b = inst.second.atoms();
    const auto qa = quantize(inst.first, inst.quantization);
    const auto qb = quantize(inst.second, inst.quantization);
    const int na = static_cast<int>(a.size()), nb = static_cast<int>(b.size());
    const int source = na + nb, sink = source + 1;
    MinCostFlow mcf(static_cast<std::size_t>(sink + 1));
    for (int i = 0; i < na; ++i) mcf.add_edge(source, i, qa[static_cast<std::size_t>(i)], 0.0);
    for (int j = 0; j < nb; ++j) mcf.add_edge(na + j, sink, qb[static_cast<std::size_t>(j)], 0.0);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j)
            mcf.add_edge(i, na + j, std::min(qa[static_cast<std::size_t>(i)], qb[static_cast<std::size_t>(j)]),
                         checked_distance(inst, a[static_cast<std::size_t>(i)].first, b[static_cast<std::size_t>(j)].first));
    const auto [flow, cost] = mcf.run(source, sink);
    if (flow != inst.quantization) throw Error("min-cost flow did not route all mass");
    return static_cast<double>(cost / static_cast<long double>(inst.quantization));
}

double coupling_tv(const SparseMeasure& first, const SparseMeasure& second) {
    require_same_group(*first.group(), *second.group());
    const auto& a = first.atoms();
    const auto& b = second.atoms();
    double overlap = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first < b[j].first) {
            ++i;
        } else if (b[j].first < a[i].first) {
            ++j;
        } else {
            overlap += std::min(a[i++].second, b[j++].second);
        }
    }
    return std::max(0.0, 1.0 - overlap);
}

}  // namespace groupnoise
