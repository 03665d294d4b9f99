#include "flowids/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

namespace flowids {

std::string to_lower_trimmed(std::string_view s) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

Taxonomy Taxonomy::parse(std::istream& in) {
    Taxonomy t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (to_lower_trimmed(line).empty()) continue;

        std::vector<std::string> fields;
        std::stringstream ss(line);
        for (std::string f; std::getline(ss, f, ',');) fields.push_back(to_lower_trimmed(f));
        if (fields.size() < 2 || fields.size() > 3)
            throw ParseError(line_no, "taxonomy rows are name,category[,new]");

        Category c;
        try {
            c = parse_category(fields[1]);
        } catch (const std::invalid_argument& e) {
            throw ParseError(line_no, e.what());
        }
        if (c == Category::normal || c == Category::unknown)
            throw ParseError(line_no, "attack '" + fields[0] + "' must map to an attack category");

        bool novel = false;
        if (fields.size() == 3) {
            if (fields[2] != "new") throw ParseError(line_no, "third column must be 'new'");
            novel = true;
        }
        if (t.entries_.contains(fields[0]))
            throw ParseError(line_no, "duplicate attack '" + fields[0] + "'");
        t.add(fields[0], c, novel);
    }
    return t;
}

Taxonomy Taxonomy::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open taxonomy file '" + path + "'");
    return parse(in);
}

void Taxonomy::add(std::string name, Category category, bool novel) {
    entries_[to_lower_trimmed(name)] = Entry{category, novel};
}

Category Taxonomy::category_of(std::string_view raw_label) const {
    const std::string label = to_lower_trimmed(raw_label);
    if (label == "normal") return Category::normal;
    auto it = entries_.find(label);
    if (it == entries_.end())
        throw DataError("attack name '" + label + "' is not in the taxonomy table");
    return it->second.category;
}

bool Taxonomy::is_novel(std::string_view raw_label) const {
    auto it = entries_.find(to_lower_trimmed(raw_label));
    return it != entries_.end() && it->second.novel;
}

void Taxonomy::write(std::ostream& out) const {
    for (const auto& [name, e] : entries_) {
        out << name << ',' << category_name(e.category);
        if (e.novel) out << ",new";
        out << '\n';
    }
}

Category map_attack_category(std::string_view raw_label, const Taxonomy& taxonomy) {
    return taxonomy.category_of(raw_label);
}

}  // namespace flowids
