#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace flawkit {

using FlawId = std::uint32_t;

/// A set of flaw ids stored as a strictly increasing vector.
class FlawSet {
public:
    FlawSet() = default;
    FlawSet(std::initializer_list<FlawId> ids) : ids_(ids) { normalize(); }
    explicit FlawSet(std::vector<FlawId> ids) : ids_(std::move(ids)) { normalize(); }

    /// Wraps a vector the caller guarantees is already sorted and duplicate free.
    static FlawSet from_sorted(std::vector<FlawId> ids) {
        FlawSet s;
        s.ids_ = std::move(ids);
        return s;
    }

    bool empty() const { return ids_.empty(); }
    std::size_t size() const { return ids_.size(); }
    bool contains(FlawId id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }

    auto begin() const { return ids_.begin(); }
    auto end() const { return ids_.end(); }
    FlawId front() const { return ids_.front(); }
    const std::vector<FlawId>& ids() const { return ids_; }

    void insert(FlawId id) {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
        if (it == ids_.end() || *it != id) ids_.insert(it, id);
    }
    void erase(FlawId id) {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
        if (it != ids_.end() && *it == id) ids_.erase(it);
    }

    bool includes(const FlawSet& sub) const {
        return std::includes(ids_.begin(), ids_.end(), sub.ids_.begin(), sub.ids_.end());
    }

    friend FlawSet operator|(const FlawSet& a, const FlawSet& b) {
        FlawSet r;
        std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r.ids_));
        return r;
    }
    friend FlawSet operator&(const FlawSet& a, const FlawSet& b) {
        FlawSet r;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r.ids_));
        return r;
    }
    friend FlawSet operator-(const FlawSet& a, const FlawSet& b) {
        FlawSet r;
        std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r.ids_));
        return r;
    }

    friend bool operator==(const FlawSet&, const FlawSet&) = default;
    friend auto operator<=>(const FlawSet& a, const FlawSet& b) { return a.ids_ <=> b.ids_; }

    std::string to_string() const {
        std::string s = "{";
        for (std::size_t i = 0; i < ids_.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(ids_[i]);
        }
        return s + "}";
    }

private:
    void normalize() {
        std::sort(ids_.begin(), ids_.end());
        ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
    }

    std::vector<FlawId> ids_;
};

} // namespace flawkit
