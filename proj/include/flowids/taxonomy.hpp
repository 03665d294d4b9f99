#pragma once

#include <istream>
#include <map>
#include <string>
#include <string_view>

#include "flowids/core.hpp"

namespace flowids {

/// Attack name -> category table.
///
/// Text format, one entry per line: `name,category[,new]`. The optional third
/// column marks attacks that occur only in the test split. `#` starts a
/// comment. "normal" is implicit.
class Taxonomy {
public:
    struct Entry {
        Category category;
        bool novel;

        bool operator==(const Entry&) const = default;
    };

    Taxonomy() = default;

    static Taxonomy parse(std::istream& in);
    static Taxonomy load(const std::string& path);

    void add(std::string name, Category category, bool novel = false);

    /// Throws DataError naming the label if it is not in the table.
    Category category_of(std::string_view raw_label) const;
    bool is_novel(std::string_view raw_label) const;

    const std::map<std::string, Entry, std::less<>>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    void write(std::ostream& out) const;

    bool operator==(const Taxonomy&) const = default;

private:
    std::map<std::string, Entry, std::less<>> entries_;
};

/// Case-insensitive lookup of a single label.
Category map_attack_category(std::string_view raw_label, const Taxonomy& taxonomy);

std::string to_lower_trimmed(std::string_view s);

}  // namespace flowids
