#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ergolab {

/// Vertex handle. Opaque 64-bit token, stable and unique within one graph
/// instance (internally a dense intern index, which makes distributions and
/// BFS tables flat arrays).
using VertexId = std::uint64_t;

struct Edge {
    VertexId to;
    std::int32_t multiplicity;
};

/// Thrown when a lazily generated graph cannot be extended far enough for
/// the requested operation (depth horizon, box boundary, ...).
struct HorizonExceeded : std::runtime_error {
    explicit HorizonExceeded(const std::string& what) : std::runtime_error(what) {}
};

enum class EdgeCache { Store, NoStore };

/// Deterministic neighborhood generator for lazily materialized graphs.
///
/// Keys are construction-specific coordinates serialized to short byte
/// strings (tree words, lattice points, level-tagged words). The oracle must
/// be a pure function of (its own parameters, key): re-expansion yields
/// identical neighbor lists in identical order.
class NeighborOracle {
public:
    virtual ~NeighborOracle() = default;

    virtual std::string root_key() const = 0;

    /// Emit each distinct neighbor of `key` exactly once as (key, multiplicity).
    virtual void neighbors(std::string_view key,
                           const std::function<void(std::string_view, std::int32_t)>& sink) const = 0;

    /// Exact graph distance when the construction affords a closed form.
    virtual std::optional<std::uint64_t> distance(std::string_view /*a*/, std::string_view /*b*/) const {
        return std::nullopt;
    }

    /// Exact vertex count of the radius-r ball when computable without
    /// materialization (used for polynomially growing trees whose balls are
    /// far too large to enumerate).
    virtual std::optional<std::uint64_t> ball_size(std::string_view /*key*/, std::uint64_t /*r*/) const {
        return std::nullopt;
    }

    /// Integer label carried by the construction (depth for canopy trees,
    /// Busemann level for the grandfather graph, ...).
    virtual std::optional<std::int64_t> label(std::string_view /*key*/) const { return std::nullopt; }

    virtual std::string name() const = 0;

    virtual std::string describe(std::string_view key) const;
};

namespace detail {

/// Interns byte-string keys to dense 32-bit ids. Keys of at most 6 bytes
/// take a flat open-addressing path (packed into one u64 with a sentinel
/// byte); longer keys fall back to a hash map. Both paths are deterministic
/// in insertion order.
class KeyInterner {
public:
    KeyInterner();

    std::uint32_t intern(std::string_view key);
    std::optional<std::uint32_t> find(std::string_view key) const;
    std::string_view key_of(std::uint32_t id, std::string& scratch) const;
    std::uint64_t size() const { return count_; }

private:
    static constexpr std::uint64_t kLongBit = 1ull << 63;

    std::uint32_t intern_packed(std::uint64_t payload);
    std::optional<std::uint32_t> find_packed(std::uint64_t payload) const;
    void grow();

    std::vector<std::uint64_t> slots_;
    std::vector<std::uint32_t> slot_ids_;
    std::uint64_t packed_count_ = 0;

    std::unordered_map<std::string, std::uint32_t> long_map_;
    std::deque<std::string> long_keys_;

    std::vector<std::uint64_t> by_id_; // packed payload, or (kLongBit | long index)
    std::uint64_t count_ = 0;
};

} // namespace detail

/// A rooted, locally finite multigraph (no loops, symmetric multiplicities),
/// either fully materialized or expanded on demand from a NeighborOracle.
///
/// Value type with shared immutable storage: copies are cheap and share the
/// materialized region; re-rooting is a field change. Lazy expansion is
/// internally synchronized, so concurrent readers are safe; signatures and
/// walks never observe partially expanded adjacency.
class RootedMultigraph {
public:
    /// Wrap a lazy construction. The root is the oracle's root key.
    static RootedMultigraph lazy(std::shared_ptr<const NeighborOracle> oracle);

    VertexId root() const { return root_; }
    RootedMultigraph rerooted(VertexId v) const;

    /// Number of vertices materialized so far (exact total for finite graphs).
    std::uint64_t vertex_count() const;

    bool is_lazy() const;
    std::uint64_t uid() const;
    const NeighborOracle* oracle() const;

    std::int64_t degree(VertexId v) const;

    /// Neighbor list (cached). Deterministic order.
    std::vector<Edge> neighbors(VertexId v) const;

    /// Visit edges of v. EdgeCache::NoStore recomputes from the oracle
    /// without growing the adjacency cache, which keeps huge exact
    /// propagations within memory budget.
    void for_each_edge(VertexId v, const std::function<void(VertexId, std::int32_t)>& f,
                       EdgeCache cache = EdgeCache::Store) const;

    /// Exact graph distance (multiplicities ignored). Uses the oracle's
    /// closed form when available, otherwise BFS.
    std::uint64_t distance(VertexId u, VertexId v) const;

    /// Vertices within distance r of center, by BFS. Returns (vertex, distance)
    /// pairs in BFS order.
    std::vector<std::pair<VertexId, std::uint32_t>> ball_vertices(VertexId center, std::uint32_t radius) const;

    /// Induced rooted sub-multigraph on the radius-r ball around center.
    RootedMultigraph ball(VertexId center, std::uint32_t radius) const;

    /// Same, also reporting the parent-graph id of each ball vertex
    /// (ball ids are 0..n-1 in BFS order; ball root is 0).
    RootedMultigraph ball_with_map(VertexId center, std::uint32_t radius,
                                   std::vector<VertexId>& to_parent) const;

    std::optional<std::uint64_t> ball_size_hint(VertexId center, std::uint64_t radius) const;

    std::optional<std::int64_t> vertex_label(VertexId v) const;

    /// Printable coordinate of v, for debugging and edge-list output.
    std::string describe(VertexId v) const;

    /// Raw intern key of v (construction coordinate bytes).
    std::string key_bytes(VertexId v) const;

    /// Find the materialized vertex with the given construction key.
    std::optional<VertexId> find_key(std::string_view key) const;
    /// Intern (materialize) the vertex with the given construction key.
    VertexId vertex_for_key(std::string_view key) const;

    /// Serialize the materialized region: `root <id>` header then one
    /// `u v multiplicity` line per unordered edge.
    void write_edge_list(std::ostream& out) const;
    static RootedMultigraph read_edge_list(std::istream& in);

    class Builder;

private:
    struct Core;
    RootedMultigraph(std::shared_ptr<Core> core, VertexId root) : core_(std::move(core)), root_(root) {}

    void ensure_expanded(VertexId v) const;

    std::shared_ptr<Core> core_;
    VertexId root_ = 0;
};

/// Builder for finite graphs. Vertices are added explicitly; edges must be
/// added once per unordered pair with multiplicity >= 1.
class RootedMultigraph::Builder {
public:
    VertexId add_vertex();
    VertexId add_vertex(std::int64_t label);
    void add_edge(VertexId u, VertexId v, std::int32_t multiplicity = 1);
    std::uint64_t vertex_count() const;
    /// Build rooted at `root`. Throws std::invalid_argument on degree-0
    /// vertices or if `require_connected` and the graph is disconnected.
    RootedMultigraph build(VertexId root, bool require_connected = true);

private:
    struct PendingEdge {
        VertexId u, v;
        std::int32_t m;
    };
    std::vector<std::optional<std::int64_t>> labels_;
    std::vector<PendingEdge> edges_;
};

} // namespace ergolab
