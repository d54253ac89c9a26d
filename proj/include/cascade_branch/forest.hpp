#pragma once

#include "cascade_branch/events.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace cascade_branch {

enum class OrphanPolicy {
    Reject,  ///< keep orphans out of the forest, list them as diagnostics
    AsSeeds, ///< promote the orphan's sender to a generation-1 seed at event time
};

struct CascadeNode {
    std::string id;
    int generation = 1;
    Timestamp infected_at = 0;
    std::optional<std::string> infector;
};

/// Infection trees rooted at seeds. Nodes are kept in infection order.
class CascadeForest {
public:
    const std::vector<CascadeNode>& nodes() const noexcept { return nodes_; }
    const CascadeNode* find(const std::string& id) const;
    std::size_t size() const noexcept { return nodes_.size(); }
    bool empty() const noexcept { return nodes_.empty(); }

    /// Records whose sender was not infected at event time.
    const std::vector<EventRecord>& orphan_records() const noexcept { return orphans_; }
    /// Number of orphan senders promoted to seeds (AsSeeds policy only).
    std::size_t promoted_seeds() const noexcept { return promoted_; }

    /// Outgoing events that reached an already-infected recipient.
    std::size_t attempt_count(const std::string& id) const;
    const std::unordered_map<std::string, std::size_t>& attempt_counts() const noexcept { return attempts_; }

    int max_generation() const noexcept { return max_generation_; }
    Timestamp origin() const;

private:
    friend CascadeForest build_forest(const EventLog&, OrphanPolicy);

    void add(CascadeNode node);

    std::vector<CascadeNode> nodes_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<EventRecord> orphans_;
    std::unordered_map<std::string, std::size_t> attempts_;
    std::size_t promoted_ = 0;
    int max_generation_ = 0;
};

/// First infection wins; events are consumed in log order (timestamp, then
/// file order). Throws NoSeeds when the log has no seed record under
/// OrphanPolicy::Reject, EmptyInput for an empty log.
CascadeForest build_forest(const EventLog& log, OrphanPolicy policy = OrphanPolicy::Reject);

} // namespace cascade_branch
