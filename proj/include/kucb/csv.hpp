#ifndef KUCB_CSV_HPP
#define KUCB_CSV_HPP

#include <string>
#include <vector>

namespace kucb {

// Minimal CSV table: header row plus numeric-or-text cells. Formatting is
// fixed ("%.12g") so reruns produce byte-identical artifacts.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 when absent
    std::vector<double> numeric_column(const std::string& name) const;
};

std::string format_double(double v);

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace kucb

#endif
