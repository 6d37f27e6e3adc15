#include "qfthermo/coding.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>

#include "qfthermo/error.hpp"
#include "qfthermo/parallel.hpp"

namespace qft {

const std::array<const char*, 12> kFourPuncturedSphereParabolics{
    "a", "A", "b", "B", "c", "C", "abc", "bca", "cab", "CBA", "BAC", "ACB"};

int ParabolicData::c_star_index(const Word& letters, std::size_t pos) const {
    if (pos + static_cast<std::size_t>(two_n) > letters.size()) return -1;
    for (std::size_t i = 0; i < c_star.size(); ++i) {
        if (std::equal(c_star[i].begin(), c_star[i].end(), letters.begin() + static_cast<std::ptrdiff_t>(pos))) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

ParabolicData build_parabolic_data() {
    ParabolicData pd;
    for (const char* w : {"abAB", "bABa", "ABab", "BabA", "baBA", "aBAb", "BAba", "AbaB"}) {
        pd.minimal_parabolics.push_back(parse_word(w));
    }
    pd.two_n = 4;
    for (const Word& c : pd.minimal_parabolics) {
        pd.c_star.push_back(power(c, pd.two_n / static_cast<int>(c.size())));
    }
    return pd;
}

std::string CodingState::name() const {
    if (kind == StateKind::a1) return "A1:" + to_string(underlying);
    return "A2:" + to_string(underlying) + "/s=" + std::to_string(s) + ",k=" + std::to_string(k);
}

TruncatedAlphabet::TruncatedAlphabet(ParabolicData pd, int s_max) : pd_(std::move(pd)), s_max_(s_max) {
    if (s_max_ < 1) fail(ErrorCode::domain, "s_max must be >= 1");
    const int two_n = pd_.two_n;

    // A1: reduced strings b_0..b_2N with neither 2N-window in C*, in
    // lexicographic order.
    Word w;
    std::function<void()> grow = [&] {
        if (static_cast<int>(w.size()) == two_n + 1) {
            if (pd_.c_star_index(w, 0) < 0 && pd_.c_star_index(w, 1) < 0) {
                CodingState st;
                st.kind = StateKind::a1;
                st.underlying = w;
                st.displacement = 1;
                st.r_value = 1;
                st.g_word = {w[1]};
                a1_index_.emplace(w, static_cast<int>(states_.size()));
                states_.push_back(std::move(st));
            }
            return;
        }
        for (Letter x : kLetters) {
            if (!w.empty() && x == inverse(w.back())) continue;
            w.push_back(x);
            grow();
            w.pop_back();
        }
    };
    grow();
    a1_count_ = static_cast<int>(states_.size());

    // A2: entry . w^s . w_1..w_{k-1} . exit, sorted by (s, underlying).
    std::vector<CodingState> a2;
    for (int s = 1; s <= s_max_; ++s) {
        for (std::size_t wi = 0; wi < pd_.c_star.size(); ++wi) {
            const Word& cw = pd_.c_star[wi];
            for (int k = 1; k <= two_n; ++k) {
                for (Letter entry : kLetters) {
                    if (entry == cw[static_cast<std::size_t>(two_n - 1)] || entry == inverse(cw[0])) continue;
                    const Letter before_exit = k >= 2 ? cw[static_cast<std::size_t>(k - 2)] : cw.back();
                    for (Letter exit : kLetters) {
                        if (exit == cw[static_cast<std::size_t>(k - 1)] || exit == inverse(before_exit)) continue;
                        CodingState st;
                        st.kind = StateKind::a2;
                        st.underlying.push_back(entry);
                        for (int j = 0; j < s; ++j) st.underlying.insert(st.underlying.end(), cw.begin(), cw.end());
                        st.underlying.insert(st.underlying.end(), cw.begin(), cw.begin() + (k - 1));
                        st.underlying.push_back(exit);
                        st.displacement = two_n * (s - 1) + k + 1;
                        st.r_value = s + 1;
                        st.g_word.assign(st.underlying.begin() + 1, st.underlying.begin() + 1 + st.displacement);
                        st.w_index = static_cast<int>(wi);
                        st.s = s;
                        st.k = k;
                        st.entry = entry;
                        st.exit = exit;
                        a2.push_back(std::move(st));
                    }
                }
            }
        }
    }
    std::stable_sort(a2.begin(), a2.end(), [](const CodingState& p, const CodingState& q) {
        if (p.s != q.s) return p.s < q.s;
        return p.underlying < q.underlying;
    });
    for (CodingState& st : a2) {
        a2_index_.emplace(std::array<int, 5>{st.w_index, st.s, st.k, index(st.entry), index(st.exit)},
                          static_cast<int>(states_.size()));
        states_.push_back(std::move(st));
    }
}

int TruncatedAlphabet::count_with_r(int n) const {
    return static_cast<int>(
        std::count_if(states_.begin(), states_.end(), [n](const CodingState& st) { return st.r_value == n; }));
}

std::optional<int> TruncatedAlphabet::find_a1(const Word& window) const {
    auto it = a1_index_.find(window);
    if (it == a1_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<int> TruncatedAlphabet::find_a2(int w_index, int s, int k, Letter entry, Letter exit) const {
    auto it = a2_index_.find({w_index, s, k, index(entry), index(exit)});
    if (it == a2_index_.end()) return std::nullopt;
    return it->second;
}

TruncatedAlphabet build_alphabet(const ParabolicData& pd, int s_max) { return TruncatedAlphabet(pd, s_max); }

bool TransitionGraph::has_edge(int from, int to) const {
    const auto& row = successors[static_cast<std::size_t>(from)];
    return std::binary_search(row.begin(), row.end(), to);
}

std::size_t TransitionGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& row : successors) n += row.size();
    return n;
}

namespace {

std::vector<int> bfs_levels(const std::vector<std::vector<int>>& adj, int source) {
    std::vector<int> level(adj.size(), -1);
    std::deque<int> queue{source};
    level[static_cast<std::size_t>(source)] = 0;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int v : adj[static_cast<std::size_t>(u)]) {
            if (level[static_cast<std::size_t>(v)] < 0) {
                level[static_cast<std::size_t>(v)] = level[static_cast<std::size_t>(u)] + 1;
                queue.push_back(v);
            }
        }
    }
    return level;
}

}  // namespace

TransitionGraph transitions(const TruncatedAlphabet& alph) {
    const int two_n = alph.parabolic_data().two_n;
    const auto& states = alph.states();
    std::map<Word, std::vector<int>> by_prefix;
    for (int i = 0; i < alph.size(); ++i) {
        const Word& u = states[static_cast<std::size_t>(i)].underlying;
        by_prefix[Word(u.begin(), u.begin() + two_n)].push_back(i);
    }
    TransitionGraph g;
    g.successors.assign(states.size(), {});
    g.predecessors.assign(states.size(), {});
    for (int i = 0; i < alph.size(); ++i) {
        const CodingState& st = states[static_cast<std::size_t>(i)];
        const std::size_t overlap = st.underlying.size() - static_cast<std::size_t>(st.displacement);
        if (overlap != static_cast<std::size_t>(two_n)) fail(ErrorCode::domain, "state overlap mismatch: " + st.name());
        const Word key(st.underlying.begin() + st.displacement, st.underlying.end());
        auto it = by_prefix.find(key);
        if (it == by_prefix.end()) continue;
        for (int j : it->second) {
            if (st.kind == StateKind::a2 && states[static_cast<std::size_t>(j)].kind == StateKind::a2) continue;
            g.successors[static_cast<std::size_t>(i)].push_back(j);
            g.predecessors[static_cast<std::size_t>(j)].push_back(i);
        }
    }
    for (auto& row : g.predecessors) std::sort(row.begin(), row.end());

    if (!states.empty()) {
        const auto fwd = bfs_levels(g.successors, 0);
        const auto bwd = bfs_levels(g.predecessors, 0);
        g.strongly_connected = std::all_of(fwd.begin(), fwd.end(), [](int l) { return l >= 0; }) &&
                               std::all_of(bwd.begin(), bwd.end(), [](int l) { return l >= 0; });
        int period = 0;
        for (std::size_t u = 0; u < states.size(); ++u) {
            if (fwd[u] < 0) continue;
            for (int v : g.successors[u]) {
                if (fwd[static_cast<std::size_t>(v)] < 0) continue;
                period = std::gcd(period, std::abs(fwd[u] + 1 - fwd[static_cast<std::size_t>(v)]));
            }
        }
        g.period = period;
    }
    return g;
}

ParseResult parse_boundary_word(const TruncatedAlphabet& alph, const Word& letters) {
    const ParabolicData& pd = alph.parabolic_data();
    const std::size_t two_n = static_cast<std::size_t>(pd.two_n);
    if (!is_reduced(letters)) fail(ErrorCode::unparseable, "letter sequence is not freely reduced");
    ParseResult out;
    if (letters.size() >= two_n && pd.c_star_index(letters, 0) >= 0) {
        fail(ErrorCode::unparseable, "sequence starts inside a parabolic window");
    }
    std::size_t p = 0;
    while (p + two_n < letters.size()) {
        const int wi = pd.c_star_index(letters, p + 1);
        if (wi < 0) {
            const Word window(letters.begin() + static_cast<std::ptrdiff_t>(p),
                              letters.begin() + static_cast<std::ptrdiff_t>(p + two_n + 1));
            const auto idx = alph.find_a1(window);
            if (!idx) fail(ErrorCode::unparseable, "no A1 state for window " + to_string(window));
            out.states.push_back(*idx);
            p += 1;
            continue;
        }
        const Word& w = pd.c_star[static_cast<std::size_t>(wi)];
        std::size_t e = p + 1;
        while (e < letters.size() && letters[e] == w[(e - p - 1) % two_n]) ++e;
        if (e >= letters.size()) break;  // clump not yet resolved
        const std::size_t run = e - (p + 1);
        const int s = static_cast<int>(run / two_n);
        const int k = static_cast<int>(run % two_n) + 1;
        if (s > alph.s_max()) {
            fail(ErrorCode::unparseable, "parabolic clump needs s = " + std::to_string(s) + " > s_max = " +
                                             std::to_string(alph.s_max()));
        }
        const auto idx = alph.find_a2(wi, s, k, letters[p], letters[e]);
        if (!idx) fail(ErrorCode::unparseable, "no A2 state at position " + std::to_string(p));
        out.states.push_back(*idx);
        p += static_cast<std::size_t>(alph.state(*idx).displacement);
    }
    out.consumed = p;
    return out;
}

namespace {

Word cycle_word(const TruncatedAlphabet& alph, const std::vector<int>& states) {
    Word w;
    for (int s : states) {
        const Word& g = alph.state(s).g_word;
        w.insert(w.end(), g.begin(), g.end());
    }
    return w;
}

bool is_least_rotation(const std::vector<int>& seq) {
    const std::size_t n = seq.size();
    for (std::size_t r = 1; r < n; ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            const int p = seq[(r + i) % n];
            const int q = seq[i];
            if (p != q) {
                if (p < q) return false;
                break;
            }
        }
    }
    return true;
}

}  // namespace

std::vector<CycleClass> enumerate_cycles(const TruncatedAlphabet& alph, const TransitionGraph& graph, int n,
                                         std::optional<int> anchor, int cap, int workers) {
    if (n > cap) fail(ErrorCode::cap_exceeded, "cycle length " + std::to_string(n) + " > cap " + std::to_string(cap));
    if (n < 1) return {};
    const int size = graph.size();
    std::vector<int> starts;
    if (anchor) {
        starts.push_back(*anchor);
    } else {
        starts.resize(static_cast<std::size_t>(size));
        std::iota(starts.begin(), starts.end(), 0);
    }
    std::vector<std::vector<CycleClass>> found(starts.size());
    parallel_for(starts.size(), workers, [&](std::size_t si) {
        const int s0 = starts[si];
        std::vector<int> path{s0};
        std::function<void()> dfs = [&] {
            const int u = path.back();
            if (static_cast<int>(path.size()) == n) {
                if (graph.has_edge(u, s0) && (anchor || is_least_rotation(path))) {
                    found[si].push_back({path, cycle_word(alph, path), {}});
                }
                return;
            }
            for (int v : graph.successors[static_cast<std::size_t>(u)]) {
                if (!anchor && v < s0) continue;  // s0 is the least index of a rotation-minimal cycle
                path.push_back(v);
                dfs();
                path.pop_back();
            }
        };
        dfs();
    });
    std::vector<CycleClass> out;
    for (auto& f : found) {
        for (auto& c : f) out.push_back(std::move(c));
    }
    return out;
}

std::vector<CycleClass> enumerate_cycles_by_word_length(const TruncatedAlphabet& alph, const TransitionGraph& graph,
                                                        int max_word_length) {
    std::vector<CycleClass> out;
    for (int s0 = 0; s0 < graph.size(); ++s0) {
        if (alph.state(s0).displacement > max_word_length) continue;
        std::vector<int> path{s0};
        int total = alph.state(s0).displacement;
        std::function<void()> dfs = [&] {
            const int u = path.back();
            if (graph.has_edge(u, s0) && is_least_rotation(path)) out.push_back({path, cycle_word(alph, path), {}});
            for (int v : graph.successors[static_cast<std::size_t>(u)]) {
                if (v < s0) continue;
                const int d = alph.state(v).displacement;
                if (total + d > max_word_length) continue;
                path.push_back(v);
                total += d;
                dfs();
                total -= d;
                path.pop_back();
            }
        };
        dfs();
    }
    return out;
}

MoebiusMap cycle_group_element(const MarkedRepresentation& rep, const TruncatedAlphabet& alph,
                               const std::vector<int>& states) {
    MoebiusMap m;
    for (int s : states) m = m * evaluate(rep, alph.state(s).g_word);
    return m;
}

MoebiusMap cycle_group_element(const MarkedRepresentation& rep, const TruncatedAlphabet& alph, CycleClass& cycle) {
    MoebiusMap m = cycle_group_element(rep, alph, cycle.states);
    cycle.lengths[rep.label()] = translation_length(m);
    return m;
}

int default_anchor(const TruncatedAlphabet& alph) {
    if (alph.a1_count() == 0) fail(ErrorCode::domain, "alphabet has no A1 states");
    return 0;
}

std::vector<MoebiusMap> state_images(const MarkedRepresentation& rep, const TruncatedAlphabet& alph) {
    std::vector<MoebiusMap> images(static_cast<std::size_t>(alph.size()));
    for (int i = 0; i < alph.size(); ++i) images[static_cast<std::size_t>(i)] = evaluate(rep, alph.state(i).g_word);
    return images;
}

double length_from_trace(Complex tr) {
    // |lambda| for the larger root of lambda^2 - tr lambda + 1.
    const Complex half = 0.5 * tr;
    const Complex root = std::sqrt(half * half - 1.0);
    const double big = std::max(std::abs(half + root), std::abs(half - root));
    return big > 1.0 ? 2.0 * std::log(big) : 0.0;
}

ClosedWalkSearch::ClosedWalkSearch(const TransitionGraph& graph, int anchor, int n_max)
    : graph_(&graph), anchor_(anchor), n_max_(n_max) {
    if (anchor < 0 || anchor >= graph.size()) fail(ErrorCode::domain, "anchor out of range");
    if (n_max < 1 || n_max > 64) fail(ErrorCode::cap_exceeded, "walk length cap out of range");
    const auto back = bfs_levels(graph.predecessors, anchor);
    need_.assign(back.size(), n_max + 1);
    closes_.assign(back.size(), 0);
    for (std::size_t v = 0; v < back.size(); ++v) {
        if (back[v] >= 0) need_[v] = back[v];
    }
    int via = n_max + 1;
    for (int v : graph.successors[static_cast<std::size_t>(anchor)]) {
        if (back[static_cast<std::size_t>(v)] >= 0) via = std::min(via, back[static_cast<std::size_t>(v)] + 1);
    }
    need_[static_cast<std::size_t>(anchor)] = via;
    for (int v : graph.predecessors[static_cast<std::size_t>(anchor)]) closes_[static_cast<std::size_t>(v)] = 1;
}

std::vector<std::uint64_t> ClosedWalkSearch::counts() const {
    // Closed-walk counts by dynamic programming on (depth, state).
    const std::size_t size = need_.size();
    std::vector<std::uint64_t> out(static_cast<std::size_t>(n_max_) + 1, 0);
    std::vector<std::uint64_t> cur(size, 0), nxt(size, 0);
    cur[static_cast<std::size_t>(anchor_)] = 1;
    for (int d = 1; d <= n_max_; ++d) {
        for (std::size_t v = 0; v < size; ++v) {
            if (cur[v] && closes_[v]) out[static_cast<std::size_t>(d)] += cur[v];
        }
        if (d == n_max_) break;
        std::fill(nxt.begin(), nxt.end(), 0);
        for (std::size_t u = 0; u < size; ++u) {
            if (!cur[u]) continue;
            for (int v : graph_->successors[u]) nxt[static_cast<std::size_t>(v)] += cur[u];
        }
        std::swap(cur, nxt);
    }
    return out;
}

}  // namespace qft
