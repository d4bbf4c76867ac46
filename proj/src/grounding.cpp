#include "geoadapt/grounding.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "geoadapt/errors.hpp"
#include "geoadapt/text_norm.hpp"

namespace geoadapt::rewards {

namespace {

bool blank(const std::string& line) {
    for (char c : line) {
        if (c != ' ' && c != '\t' && c != '\r' && c != '\n') return false;
    }
    return true;
}

}  // namespace

std::string TableGroundingProvider::make_key(std::string_view image_id,
                                             std::string_view entity) {
    std::string key(image_id);
    key.push_back('\x1f');
    key += text::fold(entity);
    return key;
}

void TableGroundingProvider::set(std::string_view image_id,
                                 std::string_view entity, double confidence) {
    if (!(confidence >= 0.0 && confidence <= 1.0)) {
        throw ValidationError("grounding confidence must lie in [0, 1]");
    }
    table_[make_key(image_id, entity)] = confidence;
}

void TableGroundingProvider::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open grounding table: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line) || line[0] == '#') continue;
        const std::string where = path + ":" + std::to_string(lineno);
        try {
            if (line.find('{') != std::string::npos) {
                const auto j = nlohmann::json::parse(line);
                set(j.at("image_id").get<std::string>(),
                    j.at("entity").get<std::string>(),
                    j.at("confidence").get<double>());
            } else {
                const auto t1 = line.find('\t');
                const auto t2 =
                    t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
                if (t2 == std::string::npos) {
                    throw ParseError("expected image_id<TAB>entity<TAB>confidence");
                }
                set(line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1),
                    std::stod(line.substr(t2 + 1)));
            }
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
}

double TableGroundingProvider::query(std::string_view entity,
                                     std::string_view image_id) const {
    const auto it = table_.find(make_key(image_id, entity));
    return it == table_.end() ? 0.0 : it->second;
}

}  // namespace geoadapt::rewards
