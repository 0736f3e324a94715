#pragma once

#include "padfeec/mesh.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace padfeec {

// Per-mesh memo for expensive global constructions. Entries hold a weak
// reference, so a new mesh at a recycled address never hits a stale value.
template <class Value>
class MeshMemo {
public:
    using Key = std::tuple<const Mesh*, int, int, double, double>;

    template <class Build>
    Value get(const std::shared_ptr<const Mesh>& mesh, int k, int variant, double t1, double t2, Build&& build) {
        const Key key{mesh.get(), k, variant, t1, t2};
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = slots_.find(key);
            if (it != slots_.end() && it->second.first.lock() == mesh) return it->second.second;
        }
        Value v = build();
        std::lock_guard<std::mutex> lock(mu_);
        if (slots_.size() >= kCapacity) slots_.clear();
        slots_[key] = {mesh, v};
        return v;
    }

private:
    static constexpr std::size_t kCapacity = 64;
    std::mutex mu_;
    std::map<Key, std::pair<std::weak_ptr<const Mesh>, Value>> slots_;
};

}  // namespace padfeec
