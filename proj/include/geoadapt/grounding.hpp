#pragma once

#include <string>
#include <string_view>
#include <unordered_map>

namespace geoadapt::rewards {

// Detection-confidence source for entity grounding. Implementations must be
// deterministic for a fixed (entity, image_id) pair within one run and safe
// for concurrent read queries.
class GroundingProvider {
public:
    virtual ~GroundingProvider() = default;

    // confidence in [0, 1]
    virtual double query(std::string_view entity,
                         std::string_view image_id) const = 0;
};

// Lookup-table provider. Unknown (image_id, entity) pairs return 0.
// File format, one record per line: either "image_id<TAB>entity<TAB>confidence"
// or a JSON object {"image_id":..., "entity":..., "confidence":...}.
class TableGroundingProvider final : public GroundingProvider {
public:
    TableGroundingProvider() = default;

    void load_file(const std::string& path);
    void set(std::string_view image_id, std::string_view entity,
             double confidence);

    double query(std::string_view entity,
                 std::string_view image_id) const override;

    std::size_t size() const { return table_.size(); }

    // entity vocabulary, useful as an extraction gazetteer
    template <typename Fn>
    void for_each_entity(Fn&& fn) const {
        for (const auto& [key, conf] : table_) {
            const auto sep = key.find('\x1f');
            fn(std::string_view(key).substr(sep + 1));
        }
    }

private:
    static std::string make_key(std::string_view image_id,
                                std::string_view entity);

    std::unordered_map<std::string, double> table_;
};

}  // namespace geoadapt::rewards
