#include "cascade_branch/forest.hpp"

#include "cascade_branch/error.hpp"

#include <algorithm>

namespace cascade_branch {

const CascadeNode* CascadeForest::find(const std::string& id) const
{
    const auto it = index_.find(id);
    return it == index_.end() ? nullptr : &nodes_[it->second];
}

std::size_t CascadeForest::attempt_count(const std::string& id) const
{
    const auto it = attempts_.find(id);
    return it == attempts_.end() ? 0 : it->second;
}

Timestamp CascadeForest::origin() const
{
    if (nodes_.empty())
        return 0;
    // nodes_ is in processing order, which is timestamp order
    return nodes_.front().infected_at;
}

void CascadeForest::add(CascadeNode node)
{
    max_generation_ = std::max(max_generation_, node.generation);
    index_.emplace(node.id, nodes_.size());
    nodes_.push_back(std::move(node));
}

CascadeForest build_forest(const EventLog& log, OrphanPolicy policy)
{
    if (log.empty())
        throw Error(ErrorKind::EmptyInput, "event log is empty");

    const auto& records = log.records();
    if (policy == OrphanPolicy::Reject &&
        std::none_of(records.begin(), records.end(), [](const EventRecord& r) { return r.is_seed(); }))
        throw Error(ErrorKind::NoSeeds, "event log has no seed records");

    CascadeForest forest;
    for (const auto& rec : records) {
        if (rec.is_seed()) {
            if (!forest.find(rec.recipient))
                forest.add({rec.recipient, 1, rec.timestamp, std::nullopt});
            continue;
        }

        const std::string& sender = *rec.sender;
        const CascadeNode* parent = forest.find(sender);
        if (!parent) {
            forest.orphans_.push_back(rec);
            if (policy == OrphanPolicy::Reject)
                continue;
            forest.add({sender, 1, rec.timestamp, std::nullopt});
            ++forest.promoted_;
            parent = forest.find(sender);
        }

        if (forest.find(rec.recipient)) {
            ++forest.attempts_[sender];
            continue;
        }
        forest.add({rec.recipient, parent->generation + 1, rec.timestamp, sender});
    }

    if (forest.empty())
        throw Error(ErrorKind::NoSeeds, "no infections could be attributed to a seed");
    return forest;
}

} // namespace cascade_branch
