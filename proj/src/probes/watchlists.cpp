#include "mirage/probes/watchlists.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mirage/util/text.hpp"

namespace mirage::probes {

namespace fs = std::filesystem;

void WatchlistSet::set(const std::string& key, std::vector<std::string> entries) {
    lists_[key] = std::move(entries);
}

const std::vector<std::string>& WatchlistSet::get(const std::string& key) const {
    static const std::vector<std::string> empty;
    auto it = lists_.find(key);
    return it == lists_.end() ? empty : it->second;
}

bool WatchlistSet::has(const std::string& key) const { return lists_.count(key) > 0; }

std::vector<std::string> WatchlistSet::parse_entries(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string entry = util::trim(line);
        if (!entry.empty()) out.push_back(std::move(entry));
    }
    return out;
}

WatchlistSet WatchlistSet::load_directory(const std::string& dir) {
    WatchlistSet set;
    if (!fs::is_directory(dir)) {
        throw std::runtime_error("watchlist directory not found: " + dir);
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        set.set(entry.path().stem().string(), parse_entries(ss.str()));
    }
    return set;
}

AvFingerprints parse_fingerprints(const std::string& text) {
    AvFingerprints out;
    std::istringstream in(text);
    std::string line;
    std::string current;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string entry = util::trim(line);
        if (entry.empty()) continue;
        if (entry.front() == '[' && entry.back() == ']') {
            current = util::trim(entry.substr(1, entry.size() - 2));
            out[current];  // register even if empty
            continue;
        }
        if (current.empty()) {
            throw std::runtime_error("fingerprint entry before any [section]: " + entry);
        }
        out[current].push_back(entry);
    }
    return out;
}

AvFingerprints load_fingerprints_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open fingerprint file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_fingerprints(ss.str());
}

}  // namespace mirage::probes
