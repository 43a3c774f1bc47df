#include "ergolab/generators.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace ergolab {

namespace {

// --------------------------------------------------------------------------
// (m, word) coordinates for the grandfather graph and the canopy trees.
//
// m identifies the spine/ray vertex under which the vertex hangs, w the
// binary word of child indices going down from it. Canonical form requires
// w[0] != 0 when m >= 1 (descending through child 0 of a spine vertex lands
// on the next spine vertex instead).

struct TreeCoord {
    std::uint32_t m = 0;
    std::vector<std::uint8_t> w; // letters in {0,1}
};

std::string encode_tree(const TreeCoord& c) {
    std::string out;
    const std::size_t nbytes = (c.w.size() + 7) / 8;
    if (c.m <= 254 && c.w.size() <= 40) {
        out.resize(2 + nbytes, '\0');
        out[0] = static_cast<char>(c.m);
        out[1] = static_cast<char>(c.w.size());
        for (std::size_t i = 0; i < c.w.size(); ++i)
            if (c.w[i]) out[2 + i / 8] |= static_cast<char>(1 << (i % 8));
        return out;
    }
    out.resize(9 + nbytes, '\0');
    out[0] = static_cast<char>(0xFF);
    for (int i = 0; i < 4; ++i) out[1 + i] = static_cast<char>((c.m >> (8 * i)) & 0xff);
    const auto len = static_cast<std::uint32_t>(c.w.size());
    for (int i = 0; i < 4; ++i) out[5 + i] = static_cast<char>((len >> (8 * i)) & 0xff);
    for (std::size_t i = 0; i < c.w.size(); ++i)
        if (c.w[i]) out[9 + i / 8] |= static_cast<char>(1 << (i % 8));
    return out;
}

TreeCoord decode_tree(std::string_view key) {
    TreeCoord c;
    std::size_t len, off;
    if (static_cast<unsigned char>(key[0]) != 0xFF) {
        c.m = static_cast<unsigned char>(key[0]);
        len = static_cast<unsigned char>(key[1]);
        off = 2;
    } else {
        c.m = 0;
        std::uint32_t l = 0;
        for (int i = 0; i < 4; ++i) c.m |= static_cast<std::uint32_t>(static_cast<unsigned char>(key[1 + i])) << (8 * i);
        for (int i = 0; i < 4; ++i) l |= static_cast<std::uint32_t>(static_cast<unsigned char>(key[5 + i])) << (8 * i);
        len = l;
        off = 9;
    }
    c.w.resize(len);
    for (std::size_t i = 0; i < len; ++i)
        c.w[i] = (static_cast<unsigned char>(key[off + i / 8]) >> (i % 8)) & 1;
    return c;
}

// word of v relative to the spine vertex at height M >= m: spine descents
// are child 0
std::vector<std::uint8_t> lift_word(const TreeCoord& c, std::uint32_t M) {
    std::vector<std::uint8_t> out(M - c.m, 0);
    out.insert(out.end(), c.w.begin(), c.w.end());
    return out;
}

std::pair<std::uint64_t, std::uint64_t> updown_split(const TreeCoord& a, const TreeCoord& b) {
    const std::uint32_t M = std::max(a.m, b.m);
    const auto wa = lift_word(a, M);
    const auto wb = lift_word(b, M);
    std::size_t lcp = 0;
    while (lcp < wa.size() && lcp < wb.size() && wa[lcp] == wb[lcp]) ++lcp;
    return {wa.size() - lcp, wb.size() - lcp};
}

// Allocation-free variant of the (m, word) coordinates for words of at
// most 40 letters held in a u64 bitfield; this is the hot path of exact
// propagation, where the generic TreeCoord code is allocation-bound.
struct ShortTree {
    std::uint32_t m;
    std::uint32_t len;
    std::uint64_t bits; // letter i at bit i
};

inline bool decode_short_tree(std::string_view key, ShortTree& out) {
    if (static_cast<unsigned char>(key[0]) == 0xFF) return false;
    out.m = static_cast<unsigned char>(key[0]);
    out.len = static_cast<unsigned char>(key[1]);
    out.bits = 0;
    for (std::size_t i = 2; i < key.size(); ++i)
        out.bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(key[i])) << (8 * (i - 2));
    return true;
}

inline std::size_t encode_short_tree(const ShortTree& k, char* buf) {
    const std::size_t nbytes = (k.len + 7) / 8;
    buf[0] = static_cast<char>(k.m);
    buf[1] = static_cast<char>(k.len);
    for (std::size_t i = 0; i < nbytes; ++i) buf[2 + i] = static_cast<char>((k.bits >> (8 * i)) & 0xff);
    return 2 + nbytes;
}

inline ShortTree short_father(const ShortTree& c) {
    if (c.len > 0) return {c.m, c.len - 1, c.bits & ((1ull << (c.len - 1)) - 1)};
    return {c.m + 1, 0, 0};
}

inline ShortTree short_son(const ShortTree& c, std::uint64_t j) {
    if (c.len == 0 && c.m >= 1) {
        if (j == 0) return {c.m - 1, 0, 0};
        return {c.m, 1, 1};
    }
    return {c.m, c.len + 1, c.bits | (j << c.len)};
}

// lifted-word letter at position i relative to the spine vertex of height M
inline std::uint64_t short_letter(const ShortTree& c, std::uint32_t M, std::uint32_t i) {
    const std::uint32_t zeros = M - c.m;
    return i < zeros ? 0 : (c.bits >> (i - zeros)) & 1;
}

inline std::pair<std::uint64_t, std::uint64_t> short_updown(const ShortTree& a, const ShortTree& b) {
    const std::uint32_t M = std::max(a.m, b.m);
    const std::uint32_t la = M - a.m + a.len, lb = M - b.m + b.len;
    std::uint32_t lcp = 0;
    const std::uint32_t lim = std::min(la, lb);
    while (lcp < lim && short_letter(a, M, lcp) == short_letter(b, M, lcp)) ++lcp;
    return {la - lcp, lb - lcp};
}

// --------------------------------------------------------------------------

class GrandfatherOracle final : public NeighborOracle {
public:
    std::string root_key() const override { return encode_tree(TreeCoord{}); }

    std::string name() const override { return "grandfather"; }

    void neighbors(std::string_view key,
                   const std::function<void(std::string_view, std::int32_t)>& sink) const override {
        ShortTree sc;
        if (decode_short_tree(key, sc) && sc.m <= 250 && sc.len <= 36) {
            char buf[8];
            const ShortTree sons[2] = {short_son(sc, 0), short_son(sc, 1)};
            const ShortTree fa = short_father(sc);
            for (const auto& s : sons) sink(std::string_view(buf, encode_short_tree(s, buf)), 1);
            sink(std::string_view(buf, encode_short_tree(fa, buf)), 1);
            for (const auto& s : sons) {
                for (std::uint64_t j = 0; j < 2; ++j)
                    sink(std::string_view(buf, encode_short_tree(short_son(s, j), buf)), 1);
            }
            sink(std::string_view(buf, encode_short_tree(short_father(fa), buf)), 1);
            return;
        }
        const TreeCoord c = decode_tree(key);
        TreeCoord sons[2];
        son(c, 0, sons[0]);
        son(c, 1, sons[1]);
        TreeCoord fa = father(c);
        for (const auto& s : sons) sink(encode_tree(s), 1);
        sink(encode_tree(fa), 1);
        for (const auto& s : sons) {
            TreeCoord gs;
            son(s, 0, gs);
            sink(encode_tree(gs), 1);
            son(s, 1, gs);
            sink(encode_tree(gs), 1);
        }
        sink(encode_tree(father(fa)), 1);
    }

    std::optional<std::uint64_t> distance(std::string_view a, std::string_view b) const override {
        ShortTree sa, sb;
        if (decode_short_tree(a, sa) && decode_short_tree(b, sb)) {
            const auto [up, down] = short_updown(sa, sb);
            return (up + 1) / 2 + (down + 1) / 2;
        }
        const auto [up, down] = updown_split(decode_tree(a), decode_tree(b));
        return (up + 1) / 2 + (down + 1) / 2;
    }

    std::optional<std::int64_t> label(std::string_view key) const override {
        const TreeCoord c = decode_tree(key);
        return static_cast<std::int64_t>(c.m) - static_cast<std::int64_t>(c.w.size());
    }

    std::string describe(std::string_view key) const override {
        const TreeCoord c = decode_tree(key);
        std::string s = "gf(m=" + std::to_string(c.m) + ",w=";
        for (auto l : c.w) s += char('0' + l);
        return s + ")";
    }

private:
    static TreeCoord father(const TreeCoord& c) {
        TreeCoord f = c;
        if (!f.w.empty()) {
            f.w.pop_back();
        } else {
            ++f.m;
        }
        return f;
    }
    static void son(const TreeCoord& c, std::uint8_t j, TreeCoord& out) {
        out = c;
        if (c.w.empty() && c.m >= 1) {
            if (j == 0) {
                --out.m;
            } else {
                out.w.assign(1, 1);
            }
            return;
        }
        out.w.push_back(j);
    }
};

// --------------------------------------------------------------------------

class LatticeOracle final : public NeighborOracle {
public:
    explicit LatticeOracle(std::uint32_t d) : d_(d) {
        if (d < 1 || d > 4) throw std::invalid_argument("lattice dimension must be in [1,4]");
    }

    std::string root_key() const override { return encode(std::vector<std::int64_t>(d_, 0)); }
    std::string name() const override { return "lattice"; }

    void neighbors(std::string_view key,
                   const std::function<void(std::string_view, std::int32_t)>& sink) const override {
        auto x = decode(key);
        for (std::uint32_t i = 0; i < d_; ++i) {
            for (int dir : {-1, +1}) {
                x[i] += dir;
                sink(encode(x), 1);
                x[i] -= dir;
            }
        }
    }

    std::optional<std::uint64_t> distance(std::string_view a, std::string_view b) const override {
        const auto xa = decode(a), xb = decode(b);
        std::uint64_t d = 0;
        for (std::uint32_t i = 0; i < d_; ++i) d += static_cast<std::uint64_t>(std::llabs(xa[i] - xb[i]));
        return d;
    }

    std::string describe(std::string_view key) const override {
        const auto x = decode(key);
        std::string s = "(";
        for (std::uint32_t i = 0; i < d_; ++i) s += (i ? "," : "") + std::to_string(x[i]);
        return s + ")";
    }

    std::string encode(const std::vector<std::int64_t>& x) const {
        // +-2^22 coordinate range keeps d<=2 keys in the packed-intern path
        std::string out(3 * d_, '\0');
        for (std::uint32_t i = 0; i < d_; ++i) {
            const auto v = static_cast<std::uint32_t>(x[i] + (1 << 22));
            out[3 * i] = static_cast<char>(v & 0xff);
            out[3 * i + 1] = static_cast<char>((v >> 8) & 0xff);
            out[3 * i + 2] = static_cast<char>((v >> 16) & 0xff);
        }
        return out;
    }

    std::vector<std::int64_t> decode(std::string_view key) const {
        std::vector<std::int64_t> x(d_);
        for (std::uint32_t i = 0; i < d_; ++i) {
            std::uint32_t v = static_cast<unsigned char>(key[3 * i]);
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(key[3 * i + 1])) << 8;
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(key[3 * i + 2])) << 16;
            x[i] = static_cast<std::int64_t>(v) - (1 << 22);
        }
        return x;
    }

private:
    std::uint32_t d_;
};

// --------------------------------------------------------------------------

class RegularTreeOracle final : public NeighborOracle {
public:
    explicit RegularTreeOracle(std::uint32_t k) : k_(k) {
        if (k < 2 || k > 64) throw std::invalid_argument("regular tree degree must be in [2,64]");
    }

    std::string root_key() const override { return encode({}); }
    std::string name() const override { return "regular_tree"; }

    void neighbors(std::string_view key,
                   const std::function<void(std::string_view, std::int32_t)>& sink) const override {
        auto w = decode(key);
        if (!w.empty()) {
            auto parent = w;
            parent.pop_back();
            sink(encode(parent), 1);
        }
        const std::uint32_t nchild = w.empty() ? k_ : k_ - 1;
        w.push_back(0);
        for (std::uint32_t j = 0; j < nchild; ++j) {
            w.back() = static_cast<std::uint8_t>(j);
            sink(encode(w), 1);
        }
    }

    std::optional<std::uint64_t> distance(std::string_view a, std::string_view b) const override {
        const auto wa = decode(a), wb = decode(b);
        std::size_t lcp = 0;
        while (lcp < wa.size() && lcp < wb.size() && wa[lcp] == wb[lcp]) ++lcp;
        return (wa.size() - lcp) + (wb.size() - lcp);
    }

    std::optional<std::int64_t> label(std::string_view key) const override {
        return static_cast<std::int64_t>(decode(key).size());
    }

    std::string describe(std::string_view key) const override {
        const auto w = decode(key);
        std::string s = "tree(";
        for (auto l : w) s += char('0' + l);
        return s + ")";
    }

private:
    std::string encode(const std::vector<std::uint8_t>& w) const {
        if (k_ <= 4 && w.size() <= 24) {
            // 2-bit letters keep deep BFS frontiers in the packed intern path
            std::string out(1 + (w.size() * 2 + 7) / 8, '\0');
            out[0] = static_cast<char>(w.size());
            for (std::size_t i = 0; i < w.size(); ++i)
                out[1 + i / 4] |= static_cast<char>(w[i] << (2 * (i % 4)));
            return out;
        }
        std::string out(5 + w.size(), '\0');
        out[0] = static_cast<char>(0xFF);
        const auto len = static_cast<std::uint32_t>(w.size());
        for (int i = 0; i < 4; ++i) out[1 + i] = static_cast<char>((len >> (8 * i)) & 0xff);
        for (std::size_t i = 0; i < w.size(); ++i) out[5 + i] = static_cast<char>(w[i]);
        return out;
    }

    std::vector<std::uint8_t> decode(std::string_view key) const {
        std::vector<std::uint8_t> w;
        if (static_cast<unsigned char>(key[0]) != 0xFF) {
            const std::size_t len = static_cast<unsigned char>(key[0]);
            w.resize(len);
            for (std::size_t i = 0; i < len; ++i)
                w[i] = (static_cast<unsigned char>(key[1 + i / 4]) >> (2 * (i % 4))) & 3;
        } else {
            std::uint32_t len = 0;
            for (int i = 0; i < 4; ++i)
                len |= static_cast<std::uint32_t>(static_cast<unsigned char>(key[1 + i])) << (8 * i);
            w.resize(len);
            for (std::size_t i = 0; i < len; ++i) w[i] = static_cast<std::uint8_t>(key[5 + i]);
        }
        return w;
    }

    std::uint32_t k_;
};

// --------------------------------------------------------------------------

class CanopyOracle final : public NeighborOracle {
public:
    CanopyOracle(std::shared_ptr<const EpsilonSequence> seq, std::uint32_t horizon, std::uint32_t root_depth,
                 bool reinforced)
        : seq_(std::move(seq)), horizon_(horizon), root_depth_(root_depth), reinforced_(reinforced) {
        if (root_depth > horizon) throw std::invalid_argument("root depth beyond horizon");
    }

    std::string root_key() const override { return encode_tree(TreeCoord{root_depth_, {}}); }
    std::string name() const override { return reinforced_ ? "canopy_reinforced" : "canopy"; }
    bool reinforced() const { return reinforced_; }
    std::uint32_t horizon() const { return horizon_; }
    std::uint32_t root_depth() const { return root_depth_; }
    const std::shared_ptr<const EpsilonSequence>& sequence() const { return seq_; }

    void neighbors(std::string_view key,
                   const std::function<void(std::string_view, std::int32_t)>& sink) const override {
        const TreeCoord c = decode_tree(key);
        const std::uint64_t d = depth(c);
        // parent (depth d+1)
        {
            TreeCoord p = c;
            if (!p.w.empty()) {
                p.w.pop_back();
            } else {
                if (p.m + 1 > horizon_)
                    throw HorizonExceeded("canopy tree: parent of depth " + std::to_string(p.m) +
                                          " beyond horizon " + std::to_string(horizon_));
                ++p.m;
            }
            sink(encode_tree(p), edge_mult(d + 1));
        }
        // children (depth d-1)
        if (d >= 1) {
            const std::int32_t eps = seq_->epsilon(d);
            const std::int32_t m = edge_mult(d);
            if (c.w.empty()) {
                TreeCoord down{c.m - 1, {}};
                sink(encode_tree(down), m);
                if (eps == 2) {
                    TreeCoord side{c.m, {1}};
                    sink(encode_tree(side), m);
                }
            } else {
                TreeCoord child = c;
                child.w.push_back(0);
                for (std::int32_t j = 0; j < eps; ++j) {
                    child.w.back() = static_cast<std::uint8_t>(j);
                    sink(encode_tree(child), m);
                }
            }
        }
    }

    std::optional<std::uint64_t> distance(std::string_view a, std::string_view b) const override {
        const auto [up, down] = updown_split(decode_tree(a), decode_tree(b));
        return up + down;
    }

    std::optional<std::uint64_t> ball_size(std::string_view key, std::uint64_t r) const override {
        const TreeCoord c = decode_tree(key);
        const std::uint64_t d = depth(c);
        if (d + r > horizon_) return std::nullopt;
        return canopy_ball_size(*seq_, d, r);
    }

    std::optional<std::int64_t> label(std::string_view key) const override {
        return static_cast<std::int64_t>(depth(decode_tree(key)));
    }

    std::string describe(std::string_view key) const override {
        const TreeCoord c = decode_tree(key);
        std::string s = "canopy(m=" + std::to_string(c.m) + ",w=";
        for (auto l : c.w) s += char('0' + l);
        return s + ")";
    }

private:
    static std::uint64_t depth(const TreeCoord& c) { return c.m - c.w.size(); }
    std::int32_t edge_mult(std::uint64_t edge_depth) const {
        if (!reinforced_) return 1;
        return static_cast<std::int32_t>(edge_depth * edge_depth);
    }

    std::shared_ptr<const EpsilonSequence> seq_;
    std::uint32_t horizon_;
    std::uint32_t root_depth_;
    bool reinforced_;
};

// --------------------------------------------------------------------------

class GaltonWatsonOracle final : public NeighborOracle {
public:
    GaltonWatsonOracle(std::vector<double> cdf, std::uint64_t seed, bool augmented)
        : cdf_(std::move(cdf)), seed_(seed), augmented_(augmented) {}

    std::string root_key() const override { return std::string(1, '\0'); }
    std::string name() const override { return augmented_ ? "agw" : "gw"; }

    void neighbors(std::string_view key,
                   const std::function<void(std::string_view, std::int32_t)>& sink) const override {
        if (key.size() == 1 && augmented_) {
            // the two roots are linked by an edge
            const char other = key[0] ? '\0' : '\x01';
            sink(std::string_view(&other, 1), 1);
        } else if (key.size() > 1) {
            std::string parent(key.substr(0, key.size() - 1));
            sink(parent, 1);
        }
        const std::uint32_t k = offspring_count(key);
        std::string child(key);
        child.push_back('\0');
        for (std::uint32_t j = 0; j < k; ++j) {
            child.back() = static_cast<char>(j);
            sink(child, 1);
        }
    }

    std::optional<std::uint64_t> distance(std::string_view a, std::string_view b) const override {
        if (a[0] != b[0]) {
            return (a.size() - 1) + 1 + (b.size() - 1);
        }
        std::size_t lcp = 1;
        while (lcp < a.size() && lcp < b.size() && a[lcp] == b[lcp]) ++lcp;
        return (a.size() - lcp) + (b.size() - lcp);
    }

    std::optional<std::int64_t> label(std::string_view key) const override {
        return static_cast<std::int64_t>(key.size()) - 1;
    }

    std::uint32_t offspring_count(std::string_view key) const {
        std::uint64_t h = seed_;
        for (char c : key) h = mix64(h ^ static_cast<unsigned char>(c));
        h = mix64(h ^ (0xA6Dull + key.size()));
        Rng rng(h);
        const double u = rng.uniform();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return static_cast<std::uint32_t>(it - cdf_.begin());
    }

private:
    std::vector<double> cdf_;
    std::uint64_t seed_;
    bool augmented_;
};

std::shared_ptr<const EpsilonSequence> shared_epsilon(std::uint64_t k_max) {
    return std::make_shared<const EpsilonSequence>(epsilon_sequence(k_max));
}

} // namespace

// ---------------------------------------------------------------------------

EpsilonSequence epsilon_sequence(std::uint64_t k_max) {
    if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
    if (k_max > 50000) throw std::invalid_argument("k_max too large: xi_k ~ k^4 overflows u64");
    EpsilonSequence s;
    s.epsilons.reserve(k_max);
    s.xis.reserve(k_max + 1);
    s.xis.push_back(1);
    std::uint64_t xi = 1;
    for (std::uint64_t k = 1; k <= k_max; ++k) {
        std::int32_t eps;
        if (k == 1) {
            eps = 1;
        } else {
            const std::uint64_t prev = k - 1;
            eps = xi > prev * prev * prev * prev ? 1 : 2;
        }
        s.epsilons.push_back(eps);
        xi *= static_cast<std::uint64_t>(eps);
        s.xis.push_back(xi);
    }
    return s;
}

std::pair<double, double> EpsilonSequence::envelope_constants() const {
    double lo = 1e300, hi = 0;
    for (std::uint64_t k = 1; k <= k_max(); ++k) {
        const double k4 = std::pow(static_cast<double>(k), 4.0);
        const double ratio = static_cast<double>(xi(static_cast<std::int64_t>(k))) / k4;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    return {lo, hi};
}

std::uint64_t canopy_ball_size(const EpsilonSequence& seq, std::uint64_t depth, std::uint64_t r) {
    // descendants of a depth-k vertex within distance j (including itself):
    // sum_{t=0}^{min(k,j)} xi_k / xi_{k-t}
    auto desc = [&seq](std::int64_t k, std::int64_t j) -> std::uint64_t {
        if (j < 0) return 0;
        const std::int64_t tmax = std::min<std::int64_t>(k, j);
        std::uint64_t total = 0;
        const std::uint64_t xik = seq.xi(k);
        for (std::int64_t t = 0; t <= tmax; ++t) total += xik / seq.xi(k - t);
        return total;
    };
    const auto d = static_cast<std::int64_t>(depth);
    const auto rr = static_cast<std::int64_t>(r);
    std::uint64_t total = desc(d, rr);
    for (std::int64_t i = 1; i <= rr; ++i) total += desc(d + i, rr - i) - desc(d + i - 1, rr - i - 1);
    return total;
}

RootedMultigraph grandfather_graph() {
    return RootedMultigraph::lazy(std::make_shared<GrandfatherOracle>());
}

RootedMultigraph lattice(std::uint32_t d) {
    return RootedMultigraph::lazy(std::make_shared<LatticeOracle>(d));
}

RootedMultigraph regular_tree(std::uint32_t k) {
    return RootedMultigraph::lazy(std::make_shared<RegularTreeOracle>(k));
}

RootedMultigraph canopy_tree(std::uint32_t n) {
    if (n < 1 || n > 22) throw std::invalid_argument("canopy_tree: n must be in [1,22] for materialization");
    const auto seq = epsilon_sequence(n);
    RootedMultigraph::Builder b;
    struct Item {
        VertexId id;
        std::uint32_t depth;
    };
    std::queue<Item> q;
    const VertexId top = b.add_vertex(static_cast<std::int64_t>(n));
    q.push({top, n});
    while (!q.empty()) {
        const Item it = q.front();
        q.pop();
        if (it.depth == 0) continue;
        const std::int32_t eps = seq.epsilon(it.depth);
        for (std::int32_t j = 0; j < eps; ++j) {
            const VertexId child = b.add_vertex(static_cast<std::int64_t>(it.depth - 1));
            b.add_edge(it.id, child, 1);
            q.push({child, it.depth - 1});
        }
    }
    return b.build(top);
}

RootedMultigraph canopy_tree_infinite(std::uint32_t depth_horizon, std::uint32_t root_depth, bool reinforced) {
    auto seq = shared_epsilon(depth_horizon + 2);
    return RootedMultigraph::lazy(
        std::make_shared<CanopyOracle>(std::move(seq), depth_horizon, root_depth, reinforced));
}

RootedMultigraph reinforce_edges(const RootedMultigraph& tree) {
    if (tree.is_lazy()) {
        const auto* canopy = dynamic_cast<const CanopyOracle*>(tree.oracle());
        if (!canopy) throw std::invalid_argument("reinforce_edges: lazy input must be a canopy tree");
        return RootedMultigraph::lazy(std::make_shared<CanopyOracle>(canopy->sequence(), canopy->horizon(),
                                                                     canopy->root_depth(), true));
    }
    const std::uint64_t n = tree.vertex_count();
    RootedMultigraph::Builder b;
    for (VertexId v = 0; v < n; ++v) {
        const auto lab = tree.vertex_label(v);
        if (!lab) throw std::invalid_argument("reinforce_edges: vertices must carry depth labels");
        b.add_vertex(*lab);
    }
    for (VertexId v = 0; v < n; ++v) {
        for (const Edge& e : tree.neighbors(v)) {
            if (e.to < v) continue;
            if (e.multiplicity != 1) throw std::invalid_argument("reinforce_edges: input already has parallel edges");
            const std::int64_t du = *tree.vertex_label(v);
            const std::int64_t dv = *tree.vertex_label(e.to);
            const std::int64_t k = std::max(du, dv);
            b.add_edge(v, e.to, static_cast<std::int32_t>(k * k));
        }
    }
    return b.build(tree.root());
}

RootDepthDistribution root_depth_distribution(std::uint32_t n) {
    if (n < 1 || n > 30) throw std::invalid_argument("root_depth_distribution: n must be in [1,30]");
    const auto seq = epsilon_sequence(n);
    RootDepthDistribution out;
    out.n = n;
    out.oriented_edge_mass.resize(n + 1);
    out.closed_form_mass.resize(n + 1);
    const std::uint64_t xin = seq.xi(n);
    for (std::uint32_t k = 0; k <= n; ++k) {
        const std::uint64_t count = xin / seq.xi(k); // vertices of depth k
        std::uint64_t deg = 0;
        if (k >= 1) deg += static_cast<std::uint64_t>(seq.epsilon(k)) * k * k; // child edges
        if (k < n) deg += static_cast<std::uint64_t>(k + 1) * (k + 1);         // parent edge
        out.oriented_edge_mass[k] = count * deg;
        // the paper's closed form, including the (spurious for k = n) ancestor term
        const std::uint64_t t1 = k == 0 ? 0 : static_cast<std::uint64_t>(k) * k * (xin / seq.xi(k - 1));
        const std::uint64_t t2 = static_cast<std::uint64_t>(k + 1) * (k + 1) * (xin / seq.xi(k));
        out.closed_form_mass[k] = t1 + t2;
    }
    for (std::uint32_t k = 0; k <= n; ++k) out.total_oriented_edges += out.oriented_edge_mass[k];
    out.enumerated.resize(n + 1);
    out.closed_form.resize(n + 1);
    for (std::uint32_t k = 0; k <= n; ++k) {
        out.enumerated[k] = static_cast<double>(out.oriented_edge_mass[k]) /
                            static_cast<double>(out.total_oriented_edges);
        out.closed_form[k] = static_cast<double>(out.closed_form_mass[k]) /
                             static_cast<double>(out.total_oriented_edges);
    }
    return out;
}

// ---------------------------------------------------------------------------
// long-range percolation

LongRangePercolation::LongRangePercolation(std::uint32_t d, double beta, double s_exp,
                                           std::int64_t box_half_width, std::uint64_t seed, LatticeNorm norm)
    : d_(d), L_(box_half_width), side_(static_cast<std::uint64_t>(2 * box_half_width + 1)) {
    if (d != 1 && d != 2) throw std::invalid_argument("long-range percolation supports d in {1,2}");
    if (beta < 0 || s_exp <= 0 || box_half_width < 1) throw std::invalid_argument("bad LRP parameters");
    Rng rng(seed);
    const double W = static_cast<double>(side_);

    auto sample_class = [&](std::int64_t a, std::int64_t b, double dist) {
        // pairs {x, x+v} with both endpoints in the box, v = (a) or (a,b)
        const std::uint64_t nx = side_ - static_cast<std::uint64_t>(std::llabs(a));
        const std::uint64_t ny = d_ == 2 ? side_ - static_cast<std::uint64_t>(std::llabs(b)) : 1;
        const std::uint64_t cnt = nx * ny;
        const double p = std::min(1.0, beta * std::pow(dist, -s_exp));
        if (p <= 0) return;
        auto emit = [&](std::uint64_t t) {
            std::int64_t x, y = 0;
            if (d_ == 1) {
                x = -L_ + static_cast<std::int64_t>(t);
            } else {
                x = -L_ + static_cast<std::int64_t>(t / ny);
                const std::int64_t ylo = b >= 0 ? -L_ : -L_ - b;
                y = ylo + static_cast<std::int64_t>(t % ny);
            }
            const std::uint64_t u = point_index({x, y});
            const std::uint64_t v = point_index({x + a, y + b});
            edge_list_.emplace_back(u, v);
        };
        if (p >= 1.0) {
            for (std::uint64_t t = 0; t < cnt; ++t) emit(t);
            return;
        }
        std::uint64_t t = rng.geometric_skips(p);
        while (t < cnt) {
            emit(t);
            t += 1 + rng.geometric_skips(p);
        }
    };

    auto norm_of = [&](std::int64_t a, std::int64_t b) {
        if (norm == LatticeNorm::L1) return static_cast<double>(std::llabs(a) + std::llabs(b));
        return std::sqrt(static_cast<double>(a) * a + static_cast<double>(b) * b);
    };

    if (d_ == 1) {
        for (std::int64_t a = 1; a < static_cast<std::int64_t>(side_); ++a) sample_class(a, 0, norm_of(a, 0));
    } else {
        for (std::int64_t a = 0; a < static_cast<std::int64_t>(side_); ++a) {
            const std::int64_t blo = a == 0 ? 1 : -(static_cast<std::int64_t>(side_) - 1);
            for (std::int64_t b = blo; b < static_cast<std::int64_t>(side_); ++b) {
                if (a == 0 && b <= 0) continue;
                sample_class(a, b, norm_of(a, b));
            }
        }
    }
    edges_ = edge_list_.size();
    (void)W;
}

std::uint64_t LongRangePercolation::point_index(const std::vector<std::int64_t>& x) const {
    std::uint64_t idx = static_cast<std::uint64_t>(x[0] + L_);
    if (d_ == 2) idx += side_ * static_cast<std::uint64_t>(x[1] + L_);
    return idx;
}

std::vector<std::int64_t> LongRangePercolation::point_of_label(std::int64_t label) const {
    const auto idx = static_cast<std::uint64_t>(label);
    if (d_ == 1) return {static_cast<std::int64_t>(idx) - L_};
    return {static_cast<std::int64_t>(idx % side_) - L_, static_cast<std::int64_t>(idx / side_) - L_};
}

std::int64_t LongRangePercolation::degree_of_origin() const {
    const std::uint64_t o = point_index(std::vector<std::int64_t>(2, 0));
    std::int64_t deg = 0;
    for (const auto& [u, v] : edge_list_)
        if (u == o || v == o) ++deg;
    return deg;
}

bool LongRangePercolation::has_edge(const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y) const {
    const std::uint64_t a = point_index(x), b = point_index(y);
    for (const auto& [u, v] : edge_list_)
        if ((u == a && v == b) || (u == b && v == a)) return true;
    return false;
}

std::optional<RootedMultigraph> LongRangePercolation::cluster_of_origin() const {
    const std::uint64_t o = point_index(std::vector<std::int64_t>(2, 0));
    std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> adj;
    adj.reserve(edge_list_.size() * 2);
    for (const auto& [u, v] : edge_list_) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    if (!adj.count(o)) return std::nullopt;
    std::unordered_map<std::uint64_t, VertexId> idx;
    RootedMultigraph::Builder b;
    std::queue<std::uint64_t> q;
    idx.emplace(o, b.add_vertex(static_cast<std::int64_t>(o)));
    q.push(o);
    std::vector<std::pair<VertexId, VertexId>> edges;
    while (!q.empty()) {
        const std::uint64_t x = q.front();
        q.pop();
        const VertexId xv = idx.at(x);
        for (std::uint64_t y : adj.at(x)) {
            auto it = idx.find(y);
            if (it == idx.end()) {
                it = idx.emplace(y, b.add_vertex(static_cast<std::int64_t>(y))).first;
                q.push(y);
            }
            if (it->second > xv) edges.emplace_back(xv, it->second);
        }
    }
    for (const auto& [u, v] : edges) b.add_edge(u, v, 1);
    return b.build(0);
}

// ---------------------------------------------------------------------------
// ensembles

Ensemble grandfather_ensemble() {
    Ensemble e;
    e.kind = "grandfather";
    e.params = nlohmann::json::object();
    e.deterministic = true;
    e.transitive = true;
    e.degree_bound = 8;
    e.sampler = [](std::uint64_t, std::uint64_t) { return grandfather_graph(); };
    return e;
}

Ensemble lattice_ensemble(std::uint32_t d) {
    Ensemble e;
    e.kind = "lattice";
    e.params = {{"d", d}};
    e.deterministic = true;
    e.transitive = true;
    e.degree_bound = 2.0 * d;
    e.sampler = [d](std::uint64_t, std::uint64_t) { return lattice(d); };
    return e;
}

Ensemble regular_tree_ensemble(std::uint32_t k) {
    Ensemble e;
    e.kind = "regular_tree";
    e.params = {{"k", k}};
    e.deterministic = true;
    e.transitive = true;
    e.degree_bound = k;
    e.sampler = [k](std::uint64_t, std::uint64_t) { return regular_tree(k); };
    return e;
}

Ensemble canopy_infinite_ensemble(std::uint32_t depth_horizon, std::uint32_t root_depth, bool reinforced) {
    Ensemble e;
    e.kind = reinforced ? "canopy_reinforced" : "canopy";
    e.params = {{"horizon", depth_horizon}, {"root_depth", root_depth}};
    e.deterministic = true;
    e.transitive = false;
    e.sampler = [=](std::uint64_t, std::uint64_t) {
        return canopy_tree_infinite(depth_horizon, root_depth, reinforced);
    };
    return e;
}

Ensemble finite_graph_ensemble(const RootedMultigraph& graph, Rooting rooting) {
    if (graph.is_lazy()) throw std::invalid_argument("finite_graph_ensemble requires a finite graph");
    const std::uint64_t n = graph.vertex_count();
    auto law = std::make_shared<ExactRootLaw>(ExactRootLaw{graph, {}});
    double total = 0;
    std::vector<double> w(n);
    for (VertexId v = 0; v < n; ++v) {
        w[v] = rooting == Rooting::Uniform ? 1.0 : static_cast<double>(graph.degree(v));
        total += w[v];
    }
    double max_deg = 0;
    for (VertexId v = 0; v < n; ++v) {
        law->weights.emplace_back(v, w[v] / total);
        max_deg = std::max(max_deg, static_cast<double>(graph.degree(v)));
    }
    auto cdf = std::make_shared<std::vector<double>>();
    cdf->reserve(n);
    double acc = 0;
    for (VertexId v = 0; v < n; ++v) {
        acc += law->weights[v].second;
        cdf->push_back(acc);
    }
    Ensemble e;
    e.kind = rooting == Rooting::Uniform ? "finite_uniform" : "finite_degree_biased";
    e.params = {{"vertices", n}};
    e.deterministic = false;
    e.transitive = false;
    e.degree_bound = max_deg;
    e.exact = law;
    e.sampler = [law, cdf](std::uint64_t seed, std::uint64_t replica) {
        Rng rng(derive_seed(seed, replica));
        const double u = rng.uniform();
        const auto it = std::upper_bound(cdf->begin(), cdf->end(), u);
        const VertexId root = static_cast<VertexId>(std::min<std::size_t>(it - cdf->begin(), cdf->size() - 1));
        return law->graph.rerooted(root);
    };
    return e;
}

Ensemble augmented_galton_watson(const std::vector<double>& offspring, GWOptions opts) {
    if (offspring.empty()) throw std::invalid_argument("offspring distribution is empty");
    double total = 0;
    for (double p : offspring) {
        if (p < 0) throw std::invalid_argument("negative offspring probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("offspring probabilities must sum to 1");
    std::vector<double> probs(offspring.begin(),
                              offspring.begin() + std::min<std::size_t>(offspring.size(), opts.max_children + 1));
    const bool truncated = probs.size() < offspring.size();
    double kept = 0;
    for (double p : probs) kept += p;
    for (double& p : probs) p /= kept;
    std::vector<double> cdf(probs.size());
    double acc = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;

    Ensemble e;
    e.kind = "agw";
    e.params = {{"offspring", offspring}, {"truncated", truncated}};
    e.deterministic = false;
    e.transitive = false;
    e.degree_bound = static_cast<double>(probs.size() - 1) + 1.0;
    const bool degenerate = probs.size() == 1; // p_0 = 1: a single edge
    if (degenerate) e.params["degenerate"] = true;
    e.sampler = [cdf](std::uint64_t seed, std::uint64_t replica) {
        return RootedMultigraph::lazy(
            std::make_shared<GaltonWatsonOracle>(cdf, derive_seed(seed, replica), true));
    };
    return e;
}

Ensemble lrp_cluster_ensemble(std::uint32_t d, double beta, double s_exp, std::int64_t box_half_width,
                              LrpOptions opts) {
    Ensemble e;
    e.kind = "lrp_cluster";
    e.params = {{"d", d}, {"beta", beta}, {"s", s_exp}, {"L", box_half_width}};
    if (s_exp <= d || s_exp >= 2.0 * d) e.params["regime_flag"] = "s outside (d, 2d)";
    e.deterministic = false;
    e.transitive = false;
    const LatticeNorm norm = opts.norm;
    const std::uint32_t max_resample = opts.max_resample;
    e.sampler = [=](std::uint64_t seed, std::uint64_t replica) {
        for (std::uint32_t attempt = 0; attempt < max_resample; ++attempt) {
            LongRangePercolation sample(d, beta, s_exp, box_half_width,
                                        derive_seed(derive_seed(seed, replica), attempt), norm);
            if (auto g = sample.cluster_of_origin()) return *g;
        }
        throw std::runtime_error("lrp_cluster_ensemble: origin isolated in every resample");
    };
    return e;
}

} // namespace ergolab
