#include "replikk/reports.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "replikk/errors.hpp"
#include "replikk/text.hpp"

namespace replikk {

using nlohmann::json;

void write_file_atomic(const std::string& path, const std::string& content) {
    std::filesystem::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(target.parent_path(), ec);
        if (ec) {
            throw data_error("cannot create directory " + target.parent_path().string() +
                             ": " + ec.message());
        }
    }
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw data_error("cannot open file for writing: " + tmp.string());
        out << content;
        if (!out) throw data_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        throw data_error("cannot rename " + tmp.string() + " to " + path + ": " +
                         ec.message());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream input(path, std::ios::binary);
    if (!input) throw data_error("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << input.rdbuf();
    return buffer.str();
}

std::string format_percent(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.1f", value);
    return buffer;
}

namespace {

// Minimal aligned table: first column left, the rest right, two-space gutter.
class text_table {
  public:
    void add_row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

    std::string to_string() const {
        std::vector<std::size_t> widths;
        for (const auto& row : rows_) {
            if (row.size() > widths.size()) widths.resize(row.size(), 0);
            for (std::size_t i = 0; i < row.size(); ++i) {
                widths[i] = std::max(widths[i], row[i].size());
            }
        }
        std::ostringstream out;
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i > 0) out << "  ";
                if (i == 0) {
                    out << row[i];
                    out << std::string(widths[i] - row[i].size(), ' ');
                } else {
                    out << std::string(widths[i] - row[i].size(), ' ');
                    out << row[i];
                }
            }
            out << "\n";
        }
        return out.str();
    }

  private:
    std::vector<std::vector<std::string>> rows_;
};

json distribution_to_json_node(const class_distribution& dist) {
    json node;
    std::size_t total = 0;
    for (sentiment_label label : canonical_labels) {
        std::size_t count = 0;
        auto it = dist.find(label);
        if (it != dist.end()) count = it->second;
        node[std::string(to_string(label))] = count;
        total += count;
    }
    node["total"] = total;
    return node;
}

json confusion_to_json(const confusion_matrix& matrix) {
    json labels = json::array();
    for (sentiment_label label : matrix.label_set()) {
        labels.push_back(std::string(to_string(label)));
    }
    json counts = json::array();
    for (sentiment_label gold : matrix.label_set()) {
        json row = json::array();
        for (sentiment_label predicted : matrix.label_set()) {
            row.push_back(matrix.count(gold, predicted));
        }
        counts.push_back(std::move(row));
    }
    return json{{"labels", std::move(labels)}, {"counts", std::move(counts)}};
}

// Cells arrive spec-major (all methods of one prompt together); recover the
// row/column structure for the text tables.
std::vector<std::string> distinct_prompts(const std::vector<cell_result>& cells) {
    std::vector<std::string> prompts;
    for (const cell_result& cell : cells) {
        if (prompts.empty() || prompts.back() != cell.prompt_code) {
            prompts.push_back(cell.prompt_code);
        }
    }
    return prompts;
}

} // namespace

std::string run_metadata_to_json(const run_metadata& meta) {
    json root;
    root["command"] = meta.command;
    root["tool_version"] = meta.tool_version;
    root["backend_id"] = meta.backend_id;
    root["config_hash"] = meta.config_hash;
    json params = json::object();
    for (const auto& [key, value] : meta.fields) params[key] = value;
    root["params"] = std::move(params);
    return root.dump(2) + "\n";
}

std::string run_report_to_json(const run_report& report) {
    json root;
    root["mode"] = std::string(to_string(report.mode));
    root["sentence_count"] = report.sentence_count;
    json cells = json::array();
    for (const cell_result& cell : report.cells) {
        json node;
        node["prompt"] = cell.prompt_code;
        node["method"] = std::string(to_string(cell.method));
        node["macro_f1"] = cell.macro_f1;
        node["accuracy"] = cell.accuracy;
        json counts = json::object();
        for (const auto& [label, count] : cell.predicted_counts) {
            counts[std::string(to_string(label))] = count;
        }
        node["predicted_counts"] = std::move(counts);
        node["confusion"] = confusion_to_json(cell.matrix);
        cells.push_back(std::move(node));
    }
    root["cells"] = std::move(cells);
    const cell_result& best = report.cells[report.best_cell];
    root["best"] = {{"index", report.best_cell},
                    {"prompt", best.prompt_code},
                    {"method", std::string(to_string(best.method))},
                    {"macro_f1", best.macro_f1},
                    {"accuracy", best.accuracy}};
    return root.dump(2) + "\n";
}

std::string run_report_to_text(const run_report& report) {
    std::vector<std::string> prompts = distinct_prompts(report.cells);
    std::size_t method_count = report.cells.size() / prompts.size();

    std::ostringstream out;
    out << "zero-shot " << to_string(report.mode) << ", " << report.sentence_count
        << " sentences\n";

    for (const char* block : {"macro-F1", "accuracy"}) {
        bool f1 = std::string(block) == "macro-F1";
        out << "\n" << block << " (%)\n";
        text_table table;
        std::vector<std::string> header{"prompt"};
        for (std::size_t mi = 0; mi < method_count; ++mi) {
            header.push_back(std::string(to_string(report.cells[mi].method)));
        }
        table.add_row(header);
        for (std::size_t pi = 0; pi < prompts.size(); ++pi) {
            std::vector<std::string> row{prompts[pi]};
            for (std::size_t mi = 0; mi < method_count; ++mi) {
                const cell_result& cell = report.cells[pi * method_count + mi];
                row.push_back(format_percent(f1 ? cell.macro_f1 : cell.accuracy));
            }
            table.add_row(std::move(row));
        }
        out << table.to_string();
    }

    const cell_result& best = report.cells[report.best_cell];
    out << "\nbest: prompt " << best.prompt_code << " method " << to_string(best.method)
        << " macro-F1 " << format_percent(best.macro_f1) << " accuracy "
        << format_percent(best.accuracy) << "\n";
    return out.str();
}

std::string few_shot_report_to_json(const few_shot_report& report) {
    json root;
    root["mode"] = std::string(to_string(report.mode));
    root["runs"] = report.runs;
    root["base_seed"] = report.base_seed;
    root["sentence_count"] = report.sentence_count;
    json cells = json::array();
    for (const few_shot_cell& cell : report.cells) {
        json node;
        node["prompt"] = cell.prompt_code;
        node["method"] = std::string(to_string(cell.method));
        node["per_run_macro_f1"] = cell.per_run_macro_f1;
        node["macro_f1_mean"] = cell.macro_f1_stats.mean;
        node["macro_f1_std"] = cell.macro_f1_stats.std_pop;
        node["per_run_accuracy"] = cell.per_run_accuracy;
        node["accuracy_mean"] = cell.accuracy_stats.mean;
        node["accuracy_std"] = cell.accuracy_stats.std_pop;
        cells.push_back(std::move(node));
    }
    root["cells"] = std::move(cells);
    const few_shot_cell& best = report.cells[report.best_cell];
    root["best"] = {{"index", report.best_cell},
                    {"prompt", best.prompt_code},
                    {"method", std::string(to_string(best.method))},
                    {"macro_f1_mean", best.macro_f1_stats.mean},
                    {"macro_f1_std", best.macro_f1_stats.std_pop}};
    return root.dump(2) + "\n";
}

std::string few_shot_report_to_text(const few_shot_report& report) {
    std::vector<std::string> prompts;
    for (const few_shot_cell& cell : report.cells) {
        if (prompts.empty() || prompts.back() != cell.prompt_code) {
            prompts.push_back(cell.prompt_code);
        }
    }
    std::size_t method_count = report.cells.size() / prompts.size();

    std::ostringstream out;
    out << "few-shot " << to_string(report.mode) << ", " << report.sentence_count
        << " sentences, " << report.runs << " runs, base seed " << report.base_seed
        << "\n\nmacro-F1 (%), mean +/- population std\n";
    text_table table;
    std::vector<std::string> header{"prompt"};
    for (std::size_t mi = 0; mi < method_count; ++mi) {
        header.push_back(std::string(to_string(report.cells[mi].method)));
    }
    table.add_row(header);
    for (std::size_t pi = 0; pi < prompts.size(); ++pi) {
        std::vector<std::string> row{prompts[pi]};
        for (std::size_t mi = 0; mi < method_count; ++mi) {
            const few_shot_cell& cell = report.cells[pi * method_count + mi];
            row.push_back(format_percent(cell.macro_f1_stats.mean) + " +/- " +
                          format_percent(cell.macro_f1_stats.std_pop));
        }
        table.add_row(std::move(row));
    }
    out << table.to_string();

    const few_shot_cell& best = report.cells[report.best_cell];
    out << "\nbest: prompt " << best.prompt_code << " method " << to_string(best.method)
        << " macro-F1 " << format_percent(best.macro_f1_stats.mean) << " +/- "
        << format_percent(best.macro_f1_stats.std_pop) << "\n";
    return out.str();
}

std::string few_shot_manifest_to_json(const few_shot_run_manifest& manifest) {
    json root;
    root["seed"] = manifest.seed;
    json entries = json::array();
    for (const few_shot_manifest_entry& entry : manifest.entries) {
        json node;
        node["sentence_id"] = entry.sentence_id;
        node["example_ids"] = entry.example_ids;
        json hashes = json::object();
        for (const auto& [code, hash] : entry.context_hashes) hashes[code] = hash;
        node["context_hashes"] = std::move(hashes);
        entries.push_back(std::move(node));
    }
    root["entries"] = std::move(entries);
    return root.dump(2) + "\n";
}

std::string predictions_to_jsonl(const std::vector<prediction>& predictions,
                                 eval_mode mode) {
    std::ostringstream out;
    for (const prediction& pred : predictions) {
        json record;
        record["sentence_id"] = pred.sentence_id;
        record["prompt"] = pred.prompt_code;
        record["method"] = std::string(to_string(pred.method));
        record["mode"] = std::string(to_string(mode));
        record["label"] = std::string(to_string(pred.label));
        record["chosen_reply"] = pred.chosen_reply;
        json scores = json::object();
        for (const auto& [text, value] : pred.scores) scores[text] = value;
        record["scores"] = std::move(scores);
        out << record.dump() << "\n";
    }
    return out.str();
}

std::vector<prediction_group> load_predictions(const std::string& path) {
    std::ifstream input(path);
    if (!input) throw data_error("cannot open predictions file: " + path);
    std::vector<prediction_group> groups;
    auto group_for = [&groups](const std::string& prompt, const std::string& method,
                               const std::string& mode) -> prediction_group& {
        for (prediction_group& group : groups) {
            if (group.prompt_code == prompt && group.method == method &&
                group.mode == mode) {
                return group;
            }
        }
        groups.push_back(prediction_group{prompt, method, mode, {}});
        return groups.back();
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(input, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            std::ostringstream msg;
            msg << path << " line " << line_no << ": " << e.what();
            throw data_error(msg.str());
        }
        try {
            prediction_group& group =
                group_for(record.at("prompt").get<std::string>(),
                          record.at("method").get<std::string>(),
                          record.value("mode", std::string("four_class")));
            std::string id = record.at("sentence_id").get<std::string>();
            sentiment_label label = parse_label(record.at("label").get<std::string>());
            if (!group.labels.emplace(id, label).second) {
                std::ostringstream msg;
                msg << path << " line " << line_no << ": duplicate prediction for sentence '"
                    << id << "' in group " << group.prompt_code << "/" << group.method;
                throw data_error(msg.str());
            }
        } catch (const json::exception& e) {
            std::ostringstream msg;
            msg << path << " line " << line_no << ": " << e.what();
            throw data_error(msg.str());
        }
    }
    if (groups.empty()) throw data_error("predictions file is empty: " + path);
    return groups;
}

namespace {

std::string kappa_cell_text(const std::optional<kappa_cell>& cell) {
    if (!cell) return "-";
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", cell->value);
    return buffer;
}

json kappa_cell_json(const std::optional<kappa_cell>& cell) {
    if (!cell) return nullptr;
    return json{{"kappa", cell->value}, {"overlap", cell->overlap}};
}

} // namespace

std::string kappa_matrix_to_json(const kappa_matrix& matrix) {
    json root;
    root["raters"] = matrix.raters;
    json cells = json::array();
    for (const auto& row : matrix.cells) {
        json out_row = json::array();
        for (const auto& cell : row) out_row.push_back(kappa_cell_json(cell));
        cells.push_back(std::move(out_row));
    }
    root["cells"] = std::move(cells);
    return root.dump(2) + "\n";
}

std::string kappa_matrix_to_text(const kappa_matrix& matrix) {
    text_table table;
    std::vector<std::string> header{""};
    header.insert(header.end(), matrix.raters.begin(), matrix.raters.end());
    table.add_row(header);
    for (std::size_t i = 0; i < matrix.raters.size(); ++i) {
        std::vector<std::string> row{matrix.raters[i]};
        for (std::size_t j = 0; j < matrix.raters.size(); ++j) {
            row.push_back(kappa_cell_text(matrix.cells[i][j]));
        }
        table.add_row(std::move(row));
    }
    return table.to_string();
}

std::string agreement_table_to_json(const agreement_table& table) {
    json root;
    root["annotators"] = table.annotators;
    json rows = json::array();
    for (std::size_t i = 0; i < table.configs.size(); ++i) {
        json node;
        node["config"] = table.configs[i];
        json cells = json::array();
        for (const auto& cell : table.cells[i]) cells.push_back(kappa_cell_json(cell));
        node["cells"] = std::move(cells);
        rows.push_back(std::move(node));
    }
    root["rows"] = std::move(rows);
    return root.dump(2) + "\n";
}

std::string agreement_table_to_text(const agreement_table& table) {
    text_table out;
    std::vector<std::string> header{"config"};
    header.insert(header.end(), table.annotators.begin(), table.annotators.end());
    out.add_row(header);
    for (std::size_t i = 0; i < table.configs.size(); ++i) {
        std::vector<std::string> row{table.configs[i]};
        for (const auto& cell : table.cells[i]) row.push_back(kappa_cell_text(cell));
        out.add_row(std::move(row));
    }
    return out.to_string();
}

std::string distribution_to_json(const class_distribution& train,
                                 const class_distribution& test) {
    class_distribution total = train;
    for (const auto& [label, count] : test) total[label] += count;
    json root;
    root["train"] = distribution_to_json_node(train);
    root["test"] = distribution_to_json_node(test);
    root["total"] = distribution_to_json_node(total);
    return root.dump(2) + "\n";
}

std::string distribution_to_text(const class_distribution& train,
                                 const class_distribution& test) {
    class_distribution total = train;
    for (const auto& [label, count] : test) total[label] += count;

    text_table table;
    std::vector<std::string> header{""};
    for (sentiment_label label : canonical_labels) {
        header.push_back(std::string(to_string(label)));
    }
    header.push_back("total");
    table.add_row(header);

    auto add_dist_row = [&table](const std::string& name, const class_distribution& dist) {
        std::vector<std::string> row{name};
        std::size_t sum = 0;
        for (sentiment_label label : canonical_labels) {
            std::size_t count = 0;
            auto it = dist.find(label);
            if (it != dist.end()) count = it->second;
            row.push_back(std::to_string(count));
            sum += count;
        }
        row.push_back(std::to_string(sum));
        table.add_row(std::move(row));
    };
    add_dist_row("train", train);
    add_dist_row("test", test);
    add_dist_row("total", total);
    return table.to_string();
}

std::string baseline_report_to_json(const baseline_report& report) {
    json root;
    root["nb"] = {{"four_class",
                   {{"macro_f1", report.four_class.macro_f1},
                    {"accuracy", report.four_class.accuracy},
                    {"confusion", confusion_to_json(report.four_class.matrix)}}},
                  {"binary",
                   {{"macro_f1", report.binary.macro_f1},
                    {"accuracy", report.binary.accuracy},
                    {"confusion", confusion_to_json(report.binary.matrix)}}}};
    root["random"] = {{"four_class", report.random_four_class},
                      {"binary", report.random_binary}};
    root["vocabulary"] = {{"size", report.vocab_size},
                          {"removed_top", report.removed_top}};
    return root.dump(2) + "\n";
}

std::string baseline_report_to_text(const baseline_report& report) {
    std::ostringstream out;
    out << "naive bayes four_class: macro-F1 " << format_percent(report.four_class.macro_f1)
        << ", accuracy " << format_percent(report.four_class.accuracy) << "\n";
    out << "naive bayes binary:     macro-F1 " << format_percent(report.binary.macro_f1)
        << ", accuracy " << format_percent(report.binary.accuracy) << "\n";
    out << "random baseline four_class: " << format_percent(report.random_four_class)
        << "\n";
    out << "random baseline binary:     " << format_percent(report.random_binary) << "\n";
    out << "vocabulary: " << report.vocab_size << " tokens, removed top "
        << report.removed_top.size() << ":";
    for (const std::string& token : report.removed_top) out << " " << token;
    out << "\n";
    return out.str();
}

namespace {

class_distribution distribution_from_json(const json& node) {
    class_distribution dist;
    for (sentiment_label label : canonical_labels) {
        dist[label] = node.value(std::string(to_string(label)), std::size_t{0});
    }
    return dist;
}

std::optional<kappa_cell> kappa_cell_from_json(const json& node) {
    if (node.is_null()) return std::nullopt;
    return kappa_cell{node.at("kappa").get<double>(),
                      node.at("overlap").get<std::size_t>()};
}

} // namespace

std::string render_text_from_json(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw data_error(std::string("report artifact: ") + e.what());
    }
    if (!root.is_object()) throw data_error("report artifact must be a JSON object");

    try {
        if (root.contains("raters")) {
            kappa_matrix matrix;
            matrix.raters = root.at("raters").get<std::vector<std::string>>();
            for (const json& row : root.at("cells")) {
                std::vector<std::optional<kappa_cell>> cells;
                for (const json& cell : row) cells.push_back(kappa_cell_from_json(cell));
                matrix.cells.push_back(std::move(cells));
            }
            return kappa_matrix_to_text(matrix);
        }
        if (root.contains("annotators")) {
            agreement_table table;
            table.annotators = root.at("annotators").get<std::vector<std::string>>();
            for (const json& row : root.at("rows")) {
                table.configs.push_back(row.at("config").get<std::string>());
                std::vector<std::optional<kappa_cell>> cells;
                for (const json& cell : row.at("cells")) {
                    cells.push_back(kappa_cell_from_json(cell));
                }
                table.cells.push_back(std::move(cells));
            }
            return agreement_table_to_text(table);
        }
        if (root.contains("nb")) {
            baseline_report report;
            report.four_class.macro_f1 = root.at("nb").at("four_class").at("macro_f1");
            report.four_class.accuracy = root.at("nb").at("four_class").at("accuracy");
            report.binary.macro_f1 = root.at("nb").at("binary").at("macro_f1");
            report.binary.accuracy = root.at("nb").at("binary").at("accuracy");
            report.random_four_class = root.at("random").at("four_class");
            report.random_binary = root.at("random").at("binary");
            report.vocab_size = root.at("vocabulary").at("size").get<std::size_t>();
            report.removed_top =
                root.at("vocabulary").at("removed_top").get<std::vector<std::string>>();
            return baseline_report_to_text(report);
        }
        if (root.contains("train") && root.contains("test")) {
            return distribution_to_text(distribution_from_json(root["train"]),
                                        distribution_from_json(root["test"]));
        }
        if (root.contains("runs") && root.contains("cells")) {
            few_shot_report report;
            report.mode = parse_eval_mode(root.at("mode").get<std::string>());
            report.runs = root.at("runs").get<std::size_t>();
            report.base_seed = root.at("base_seed").get<std::uint64_t>();
            report.sentence_count = root.at("sentence_count").get<std::size_t>();
            for (const json& node : root.at("cells")) {
                few_shot_cell cell;
                cell.prompt_code = node.at("prompt").get<std::string>();
                cell.method = parse_method(node.at("method").get<std::string>());
                cell.macro_f1_stats = {node.at("macro_f1_mean").get<double>(),
                                       node.at("macro_f1_std").get<double>()};
                cell.accuracy_stats = {node.at("accuracy_mean").get<double>(),
                                       node.at("accuracy_std").get<double>()};
                report.cells.push_back(std::move(cell));
            }
            report.best_cell = root.at("best").at("index").get<std::size_t>();
            return few_shot_report_to_text(report);
        }
        if (root.contains("cells") && root.contains("best")) {
            run_report report;
            report.mode = parse_eval_mode(root.at("mode").get<std::string>());
            report.sentence_count = root.at("sentence_count").get<std::size_t>();
            for (const json& node : root.at("cells")) {
                cell_result cell;
                cell.prompt_code = node.at("prompt").get<std::string>();
                cell.method = parse_method(node.at("method").get<std::string>());
                cell.macro_f1 = node.at("macro_f1").get<double>();
                cell.accuracy = node.at("accuracy").get<double>();
                report.cells.push_back(std::move(cell));
            }
            report.best_cell = root.at("best").at("index").get<std::size_t>();
            return run_report_to_text(report);
        }
    } catch (const json::exception& e) {
        throw data_error(std::string("report artifact: ") + e.what());
    }
    throw data_error("unrecognized report artifact shape");
}

} // namespace replikk
