#include "ergolab/graph.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <charconv>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>

#include "ergolab/rng.hpp"

namespace ergolab {

std::string NeighborOracle::describe(std::string_view key) const {
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(key.size() * 2);
    for (unsigned char c : key) {
        out.push_back(hex[c >> 4]);
        out.push_back(hex[c & 15]);
    }
    return out;
}

namespace detail {

namespace {

constexpr std::uint64_t kEmptySlot = 0;

// keys of <= 6 bytes pack into a u64: bytes little-endian, then a 0x80
// sentinel, then zero padding. Injective, never 0, and the top bit stays
// clear (it tags long-key entries in the id table).
std::optional<std::uint64_t> pack_key(std::string_view key) {
    if (key.size() > 6) return std::nullopt;
    std::uint64_t payload = 0;
    for (std::size_t i = 0; i < key.size(); ++i) {
        payload |= static_cast<std::uint64_t>(static_cast<unsigned char>(key[i])) << (8 * i);
    }
    payload |= 0x80ull << (8 * key.size());
    return payload;
}

std::size_t unpack_key(std::uint64_t payload, char* out7) {
    int top = 7;
    while (((payload >> (8 * top)) & 0xff) == 0) --top;
    assert(((payload >> (8 * top)) & 0xff) == 0x80);
    for (int i = 0; i < top; ++i) out7[i] = static_cast<char>((payload >> (8 * i)) & 0xff);
    return static_cast<std::size_t>(top);
}

} // namespace

KeyInterner::KeyInterner() : slots_(64, kEmptySlot), slot_ids_(64, 0) {}

void KeyInterner::grow() {
    std::vector<std::uint64_t> old_slots = std::move(slots_);
    std::vector<std::uint32_t> old_ids = std::move(slot_ids_);
    const std::size_t cap = old_slots.size() * 2;
    slots_.assign(cap, kEmptySlot);
    slot_ids_.assign(cap, 0);
    for (std::size_t i = 0; i < old_slots.size(); ++i) {
        if (old_slots[i] == kEmptySlot) continue;
        std::size_t j = mix64(old_slots[i]) & (cap - 1);
        while (slots_[j] != kEmptySlot) j = (j + 1) & (cap - 1);
        slots_[j] = old_slots[i];
        slot_ids_[j] = old_ids[i];
    }
}

std::uint32_t KeyInterner::intern_packed(std::uint64_t payload) {
    if (packed_count_ * 10 >= slots_.size() * 7) grow();
    const std::size_t mask = slots_.size() - 1;
    std::size_t j = mix64(payload) & mask;
    while (slots_[j] != kEmptySlot) {
        if (slots_[j] == payload) return slot_ids_[j];
        j = (j + 1) & mask;
    }
    const auto id = static_cast<std::uint32_t>(count_++);
    slots_[j] = payload;
    slot_ids_[j] = id;
    ++packed_count_;
    by_id_.push_back(payload);
    return id;
}

std::optional<std::uint32_t> KeyInterner::find_packed(std::uint64_t payload) const {
    const std::size_t mask = slots_.size() - 1;
    std::size_t j = mix64(payload) & mask;
    while (slots_[j] != kEmptySlot) {
        if (slots_[j] == payload) return slot_ids_[j];
        j = (j + 1) & mask;
    }
    return std::nullopt;
}

std::uint32_t KeyInterner::intern(std::string_view key) {
    if (auto packed = pack_key(key)) return intern_packed(*packed);
    auto it = long_map_.find(std::string(key));
    if (it != long_map_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(count_++);
    long_keys_.emplace_back(key);
    long_map_.emplace(long_keys_.back(), id);
    by_id_.push_back(kLongBit | (long_keys_.size() - 1));
    return id;
}

std::optional<std::uint32_t> KeyInterner::find(std::string_view key) const {
    if (auto packed = pack_key(key)) return find_packed(*packed);
    auto it = long_map_.find(std::string(key));
    if (it == long_map_.end()) return std::nullopt;
    return it->second;
}

std::string_view KeyInterner::key_of(std::uint32_t id, std::string& scratch) const {
    const std::uint64_t entry = by_id_.at(id);
    if (entry & kLongBit) return long_keys_[entry & ~kLongBit];
    scratch.resize(7);
    const std::size_t n = unpack_key(entry, scratch.data());
    return std::string_view(scratch.data(), n);
}

} // namespace detail

// ---------------------------------------------------------------------------

struct RootedMultigraph::Core {
    std::shared_ptr<const NeighborOracle> oracle; // null for finite graphs
    mutable detail::KeyInterner interner;
    mutable std::vector<std::int64_t> adj_start; // -1 = not expanded
    mutable std::vector<std::uint32_t> adj_len;
    mutable std::vector<Edge> arena;
    std::vector<std::optional<std::int64_t>> labels; // finite graphs only
    mutable std::recursive_mutex mu;
    std::uint64_t uid;
    bool finite = false;

    Core() {
        static std::atomic<std::uint64_t> next{1};
        uid = next.fetch_add(1);
    }

    void sync_adj_size() const {
        const auto n = interner.size();
        if (adj_start.size() < n) {
            adj_start.resize(n, -1);
            adj_len.resize(n, 0);
        }
    }

    void expand(std::uint32_t v) const {
        sync_adj_size();
        if (adj_start[v] >= 0) return;
        if (!oracle) throw std::logic_error("finite graph has unexpanded vertex");
        std::string scratch;
        const std::string_view key = interner.key_of(v, scratch);
        // the oracle may intern new ids while we read `key`; keys of expanded
        // vertices must therefore be copied out first
        const std::string key_copy(key);
        const std::int64_t start = static_cast<std::int64_t>(arena.size());
        std::uint32_t len = 0;
        oracle->neighbors(key_copy, [&](std::string_view nk, std::int32_t m) {
            const std::uint32_t nid = interner.intern(nk);
            arena.push_back(Edge{nid, m});
            ++len;
        });
        if (len == 0) throw std::logic_error("oracle produced an isolated vertex");
        sync_adj_size();
        adj_start[v] = start;
        adj_len[v] = len;
    }
};

RootedMultigraph RootedMultigraph::lazy(std::shared_ptr<const NeighborOracle> oracle) {
    auto core = std::make_shared<Core>();
    core->oracle = std::move(oracle);
    core->finite = false;
    const std::uint32_t root = core->interner.intern(core->oracle->root_key());
    return RootedMultigraph(std::move(core), root);
}

RootedMultigraph RootedMultigraph::rerooted(VertexId v) const {
    RootedMultigraph g = *this;
    g.root_ = v;
    return g;
}

std::uint64_t RootedMultigraph::vertex_count() const {
    std::lock_guard lk(core_->mu);
    return core_->interner.size();
}

bool RootedMultigraph::is_lazy() const { return core_->oracle != nullptr; }
std::uint64_t RootedMultigraph::uid() const { return core_->uid; }
const NeighborOracle* RootedMultigraph::oracle() const { return core_->oracle.get(); }

void RootedMultigraph::ensure_expanded(VertexId v) const {
    core_->expand(static_cast<std::uint32_t>(v));
}

std::int64_t RootedMultigraph::degree(VertexId v) const {
    std::lock_guard lk(core_->mu);
    ensure_expanded(v);
    const auto start = core_->adj_start[v];
    const auto len = core_->adj_len[v];
    std::int64_t deg = 0;
    for (std::uint32_t i = 0; i < len; ++i) deg += core_->arena[start + i].multiplicity;
    return deg;
}

std::vector<Edge> RootedMultigraph::neighbors(VertexId v) const {
    std::lock_guard lk(core_->mu);
    ensure_expanded(v);
    const auto start = core_->adj_start[v];
    const auto len = core_->adj_len[v];
    return std::vector<Edge>(core_->arena.begin() + start, core_->arena.begin() + start + len);
}

void RootedMultigraph::for_each_edge(VertexId v, const std::function<void(VertexId, std::int32_t)>& f,
                                     EdgeCache cache) const {
    std::lock_guard lk(core_->mu);
    core_->sync_adj_size();
    if (core_->adj_start[v] >= 0) {
        const auto start = core_->adj_start[v];
        const auto len = core_->adj_len[v];
        for (std::uint32_t i = 0; i < len; ++i) {
            const Edge& e = core_->arena[start + i];
            f(e.to, e.multiplicity);
        }
        return;
    }
    if (cache == EdgeCache::Store || !core_->oracle) {
        ensure_expanded(v);
        const auto start = core_->adj_start[v];
        const auto len = core_->adj_len[v];
        for (std::uint32_t i = 0; i < len; ++i) {
            const Edge& e = core_->arena[start + i];
            f(e.to, e.multiplicity);
        }
        return;
    }
    std::string scratch;
    const std::string key_copy(core_->interner.key_of(static_cast<std::uint32_t>(v), scratch));
    core_->oracle->neighbors(key_copy, [&](std::string_view nk, std::int32_t m) {
        f(core_->interner.intern(nk), m);
    });
}

std::uint64_t RootedMultigraph::distance(VertexId u, VertexId v) const {
    if (u == v) return 0;
    if (core_->oracle) {
        std::string su, sv;
        std::string ku, kv;
        {
            std::lock_guard lk(core_->mu);
            ku = std::string(core_->interner.key_of(static_cast<std::uint32_t>(u), su));
            kv = std::string(core_->interner.key_of(static_cast<std::uint32_t>(v), sv));
        }
        if (auto d = core_->oracle->distance(ku, kv)) return *d;
    }
    // BFS from u until v is found
    std::vector<std::uint32_t> dist(vertex_count(), UINT32_MAX);
    std::queue<VertexId> q;
    dist[u] = 0;
    q.push(u);
    while (!q.empty()) {
        const VertexId x = q.front();
        q.pop();
        const std::uint32_t dx = dist[x];
        bool found = false;
        std::uint64_t out = 0;
        for_each_edge(x, [&](VertexId y, std::int32_t) {
            if (y >= dist.size())
                dist.resize(std::max<std::size_t>(y + 1, dist.size() + dist.size() / 2), UINT32_MAX);
            if (dist[y] == UINT32_MAX) {
                dist[y] = dx + 1;
                if (y == v) {
                    found = true;
                    out = dx + 1;
                }
                q.push(y);
            }
        });
        if (found) return out;
    }
    throw HorizonExceeded("distance: target not reachable in materializable region");
}

std::vector<std::pair<VertexId, std::uint32_t>> RootedMultigraph::ball_vertices(VertexId center,
                                                                                std::uint32_t radius) const {
    std::vector<std::pair<VertexId, std::uint32_t>> out;
    std::vector<std::uint32_t> dist(vertex_count(), UINT32_MAX);
    if (center >= dist.size()) dist.resize(center + 1, UINT32_MAX);
    std::queue<VertexId> q;
    dist[center] = 0;
    q.push(center);
    out.emplace_back(center, 0);
    while (!q.empty()) {
        const VertexId x = q.front();
        q.pop();
        const std::uint32_t dx = dist[x];
        if (dx == radius) continue;
        for_each_edge(x, [&](VertexId y, std::int32_t) {
            if (y >= dist.size())
                dist.resize(std::max<std::size_t>(y + 1, dist.size() + dist.size() / 2), UINT32_MAX);
            if (dist[y] == UINT32_MAX) {
                dist[y] = dx + 1;
                out.emplace_back(y, dx + 1);
                q.push(y);
            }
        });
    }
    return out;
}

RootedMultigraph RootedMultigraph::ball(VertexId center, std::uint32_t radius) const {
    std::vector<VertexId> unused;
    return ball_with_map(center, radius, unused);
}

RootedMultigraph RootedMultigraph::ball_with_map(VertexId center, std::uint32_t radius,
                                                 std::vector<VertexId>& to_parent) const {
    const auto verts = ball_vertices(center, radius);
    std::unordered_map<VertexId, std::uint32_t> index;
    index.reserve(verts.size() * 2);
    to_parent.clear();
    to_parent.reserve(verts.size());
    for (std::uint32_t i = 0; i < verts.size(); ++i) {
        index.emplace(verts[i].first, i);
        to_parent.push_back(verts[i].first);
    }
    Builder b;
    for (const auto& [pv, d] : verts) {
        (void)d;
        if (auto lab = vertex_label(pv))
            b.add_vertex(*lab);
        else
            b.add_vertex();
    }
    for (std::uint32_t i = 0; i < verts.size(); ++i) {
        for_each_edge(verts[i].first, [&](VertexId y, std::int32_t m) {
            auto it = index.find(y);
            if (it == index.end()) return; // outside the ball
            if (it->second > i) b.add_edge(i, it->second, m);
        });
    }
    // radius-0 ball: a single root vertex with no edges
    return b.build(0, /*require_connected=*/false);
}

std::optional<std::uint64_t> RootedMultigraph::ball_size_hint(VertexId center, std::uint64_t radius) const {
    if (!core_->oracle) return std::nullopt;
    std::string s;
    std::string key;
    {
        std::lock_guard lk(core_->mu);
        key = std::string(core_->interner.key_of(static_cast<std::uint32_t>(center), s));
    }
    return core_->oracle->ball_size(key, radius);
}

std::optional<std::int64_t> RootedMultigraph::vertex_label(VertexId v) const {
    if (core_->oracle) {
        std::string s;
        std::string key;
        {
            std::lock_guard lk(core_->mu);
            key = std::string(core_->interner.key_of(static_cast<std::uint32_t>(v), s));
        }
        return core_->oracle->label(key);
    }
    if (v < core_->labels.size()) return core_->labels[v];
    return std::nullopt;
}

std::string RootedMultigraph::describe(VertexId v) const {
    std::string s;
    std::lock_guard lk(core_->mu);
    const auto key = core_->interner.key_of(static_cast<std::uint32_t>(v), s);
    if (core_->oracle) return core_->oracle->describe(key);
    return std::to_string(v);
}

std::string RootedMultigraph::key_bytes(VertexId v) const {
    std::string s;
    std::lock_guard lk(core_->mu);
    return std::string(core_->interner.key_of(static_cast<std::uint32_t>(v), s));
}

std::optional<VertexId> RootedMultigraph::find_key(std::string_view key) const {
    std::lock_guard lk(core_->mu);
    if (auto id = core_->interner.find(key)) return static_cast<VertexId>(*id);
    return std::nullopt;
}

VertexId RootedMultigraph::vertex_for_key(std::string_view key) const {
    std::lock_guard lk(core_->mu);
    return core_->interner.intern(key);
}

void RootedMultigraph::write_edge_list(std::ostream& out) const {
    std::lock_guard lk(core_->mu);
    out << "root " << root_ << "\n";
    core_->sync_adj_size();
    const auto n = core_->interner.size();
    for (std::uint64_t u = 0; u < n; ++u) {
        if (core_->adj_start[u] < 0) continue;
        const auto start = core_->adj_start[u];
        const auto len = core_->adj_len[u];
        for (std::uint32_t i = 0; i < len; ++i) {
            const Edge& e = core_->arena[start + i];
            if (e.to > u || (core_->adj_start[e.to] < 0)) out << u << " " << e.to << " " << e.multiplicity << "\n";
        }
    }
}

RootedMultigraph RootedMultigraph::read_edge_list(std::istream& in) {
    std::string tok;
    in >> tok;
    if (tok != "root") throw std::invalid_argument("edge list must start with 'root <id>'");
    std::uint64_t root_file = 0;
    in >> root_file;
    std::unordered_map<std::uint64_t, VertexId> remap;
    Builder b;
    auto id_of = [&](std::uint64_t file_id) {
        auto it = remap.find(file_id);
        if (it != remap.end()) return it->second;
        const VertexId v = b.add_vertex();
        remap.emplace(file_id, v);
        return v;
    };
    (void)id_of(root_file);
    std::uint64_t u, v;
    std::int32_t m;
    while (in >> u >> v >> m) b.add_edge(id_of(u), id_of(v), m);
    return b.build(remap.at(root_file));
}

// ---------------------------------------------------------------------------

VertexId RootedMultigraph::Builder::add_vertex() {
    labels_.emplace_back(std::nullopt);
    return labels_.size() - 1;
}

VertexId RootedMultigraph::Builder::add_vertex(std::int64_t label) {
    labels_.emplace_back(label);
    return labels_.size() - 1;
}

std::uint64_t RootedMultigraph::Builder::vertex_count() const { return labels_.size(); }

void RootedMultigraph::Builder::add_edge(VertexId u, VertexId v, std::int32_t multiplicity) {
    if (u == v) throw std::invalid_argument("loops are not allowed");
    if (multiplicity < 1) throw std::invalid_argument("multiplicity must be >= 1");
    if (u >= labels_.size() || v >= labels_.size()) throw std::invalid_argument("edge endpoint out of range");
    edges_.push_back(PendingEdge{u, v, multiplicity});
}

RootedMultigraph RootedMultigraph::Builder::build(VertexId root, bool require_connected) {
    const std::uint64_t n = labels_.size();
    if (root >= n) throw std::invalid_argument("root out of range");
    auto core = std::make_shared<Core>();
    core->finite = true;
    core->labels = std::move(labels_);

    // intern dense index keys so that the uniform key machinery applies
    char buf[4];
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto x = static_cast<std::uint32_t>(i);
        buf[0] = static_cast<char>(x & 0xff);
        buf[1] = static_cast<char>((x >> 8) & 0xff);
        buf[2] = static_cast<char>((x >> 16) & 0xff);
        buf[3] = static_cast<char>((x >> 24) & 0xff);
        core->interner.intern(std::string_view(buf, 4));
    }

    std::vector<std::vector<Edge>> adj(n);
    for (const auto& e : edges_) {
        adj[e.u].push_back(Edge{e.v, e.m});
        adj[e.v].push_back(Edge{e.u, e.m});
    }
    core->sync_adj_size();
    for (std::uint64_t i = 0; i < n; ++i) {
        if (adj[i].empty() && n > 1)
            throw std::invalid_argument("vertex " + std::to_string(i) + " has degree 0");
        std::sort(adj[i].begin(), adj[i].end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
        for (std::size_t k = 1; k < adj[i].size(); ++k) {
            if (adj[i][k].to == adj[i][k - 1].to)
                throw std::invalid_argument("edge added twice; use multiplicity instead");
        }
        core->adj_start[i] = static_cast<std::int64_t>(core->arena.size());
        core->adj_len[i] = static_cast<std::uint32_t>(adj[i].size());
        core->arena.insert(core->arena.end(), adj[i].begin(), adj[i].end());
    }

    RootedMultigraph g(core, root);
    if (require_connected && n > 1) {
        const auto reach = g.ball_vertices(root, UINT32_MAX);
        if (reach.size() != n) throw std::invalid_argument("graph is not connected");
    }
    return g;
}

} // namespace ergolab
