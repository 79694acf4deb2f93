#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace pacsim {

// Ordered path collection for the stack decoders: kept sorted descending by
// metric after every push, so top() is always the best path. Ties order the
// longer path first, then first-pushed first, which keeps the search fully
// deterministic. P needs members `G` (double) and `depth` (int).
template <class P>
class StackStore {
public:
    void push(P v) {
        Item it{std::move(v), seq_++};
        auto pos = std::upper_bound(items_.begin(), items_.end(), it,
                                    [](const Item& a, const Item& b) { return before(a, b); });
        items_.insert(pos, std::move(it));
    }

    const P& top() const { return items_.front().val; }

    P pop_top() {
        P out = std::move(items_.front().val);
        items_.erase(items_.begin());
        return out;
    }

    size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }

    bool is_sorted_descending() const {
        for (size_t k = 1; k < items_.size(); ++k)
            if (before(items_[k], items_[k - 1])) return false;
        return true;
    }

private:
    struct Item {
        P val;
        uint64_t seq;
    };

    static bool before(const Item& a, const Item& b) {
        if (a.val.G != b.val.G) return a.val.G > b.val.G;
        if (a.val.depth != b.val.depth) return a.val.depth > b.val.depth;
        return a.seq < b.seq;
    }

    std::vector<Item> items_;
    uint64_t seq_ = 0;
};

} // namespace pacsim
