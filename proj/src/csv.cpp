#include "sfde/csv.hpp"

#include "sfde/error.hpp"

#include <charconv>
#include <fstream>

namespace sfde {

std::string format_number(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return {buf, res.ptr};
}

CsvTable::CsvTable(std::initializer_list<std::string_view> header) : columns_(header.size()) {
    bool first = true;
    for (auto h : header) {
        if (!first) text_ += ',';
        text_ += h;
        first = false;
    }
    text_ += '\n';
}

CsvTable& CsvTable::row() {
    if (in_row_ != 0 && in_row_ != columns_) throw InputError("csv: row has too few fields");
    if (in_row_ != 0) text_ += '\n';
    in_row_ = 0;
    return *this;
}

CsvTable& CsvTable::add(std::string_view v) {
    if (in_row_ == columns_) throw InputError("csv: too many fields in row");
    if (in_row_ > 0) text_ += ',';
    text_ += v;
    ++in_row_;
    return *this;
}

CsvTable& CsvTable::add(double v) { return add(std::string_view(format_number(v))); }

CsvTable& CsvTable::add(std::uint64_t v) { return add(std::string_view(std::to_string(v))); }

void CsvTable::save(const std::filesystem::path& path) const {
    if (in_row_ != 0 && in_row_ != columns_) throw InputError("csv: last row has too few fields");
    std::string body = text_;
    if (in_row_ != 0) body += '\n';
    write_text(path, body);
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) throw IoError("write to " + path.string() + " failed");
}

}  // namespace sfde
