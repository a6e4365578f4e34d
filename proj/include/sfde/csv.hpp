#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace sfde {

/// Shortest form that still carries 17 significant digits ("%.17g").
std::string format_number(double v);

/// Rows are buffered and written in one go by `save`, which throws IoError.
class CsvTable {
public:
    explicit CsvTable(std::initializer_list<std::string_view> header);

    CsvTable& row();
    CsvTable& add(double v);
    CsvTable& add(std::uint64_t v);
    CsvTable& add(std::string_view v);

    std::size_t columns() const { return columns_; }
    const std::string& text() const { return text_; }
    void save(const std::filesystem::path& path) const;

private:
    std::size_t columns_;
    std::size_t in_row_ = 0;
    std::string text_;
};

/// Writes `text` to `path`, creating parent directories. Throws IoError.
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace sfde
