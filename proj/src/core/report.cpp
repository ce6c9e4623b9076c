#include "core/report.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "core/common.hpp"
#include "core/dataset.hpp"

namespace mribench::report {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string fixed4(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(4) << v;
  return ss.str();
}

ordered_json load_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_data("cannot open " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw_data("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void store_json(const std::filesystem::path& path, const ordered_json& obj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_data("cannot open for writing: " + path.string());
  out << obj.dump(2) << "\n";
  if (!out.flush()) throw_data("failed writing " + path.string());
}

}  // namespace

void RunMeta::save(const std::filesystem::path& path) const {
  ordered_json obj;
  obj["model_id"] = model_id;
  obj["config_hash"] = config_hash;
  obj["init"] = init;
  obj["data_root"] = data_root;
  obj["split_csv"] = split_csv;
  obj["seed"] = seed;
  store_json(path, obj);
}

RunMeta RunMeta::load(const std::filesystem::path& path) {
  auto obj = load_json(path);
  RunMeta meta;
  try {
    meta.model_id = obj.at("model_id").get<std::string>();
    meta.config_hash = obj.at("config_hash").get<std::string>();
    meta.init = obj.at("init").get<std::string>();
    meta.data_root = obj.at("data_root").get<std::string>();
    meta.split_csv = obj.at("split_csv").get<std::string>();
    meta.seed = obj.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw_data("run metadata " + path.string() + " is incomplete: " +
               e.what());
  }
  return meta;
}

void write_curves_csv(const std::filesystem::path& path,
                      const train::TrainingHistory& history) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_data("cannot open for writing: " + path.string());
  out << "epoch,lr,train_loss,train_acc,val_loss,val_acc\n";
  out << std::setprecision(17);
  for (const auto& r : history.records) {
    out << r.epoch << ',' << r.lr << ',' << r.train_loss << ','
        << r.train_acc << ',' << r.val_loss << ',' << r.val_acc << '\n';
  }
  if (!out.flush()) throw_data("failed writing " + path.string());
}

std::vector<train::EpochRecord> read_curves_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_data("curves file not found: " + path.string());
  std::string line;
  if (!std::getline(in, line) ||
      line != "epoch,lr,train_loss,train_acc,val_loss,val_acc") {
    throw_data("curves file " + path.string() + ": unexpected header");
  }
  std::vector<train::EpochRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 6) {
      throw_data("curves file " + path.string() + ": line " +
                 std::to_string(line_no) + ": expected 6 fields");
    }
    try {
      train::EpochRecord r;
      r.epoch = std::stoi(fields[0]);
      r.lr = std::stod(fields[1]);
      r.train_loss = std::stod(fields[2]);
      r.train_acc = std::stod(fields[3]);
      r.val_loss = std::stod(fields[4]);
      r.val_acc = std::stod(fields[5]);
      records.push_back(r);
    } catch (const std::exception&) {
      throw_data("curves file " + path.string() + ": line " +
                 std::to_string(line_no) + ": malformed number");
    }
  }
  if (records.empty())
    throw_data("curves file " + path.string() + " holds no epochs");
  return records;
}

void write_metrics_json(const std::filesystem::path& path,
                        const std::string& model_id,
                        const metrics::MetricsReport& report,
                        const std::string& config_hash) {
  ordered_json obj;
  obj["model_id"] = model_id;
  obj["avg_loss"] = report.avg_loss;
  obj["accuracy"] = report.accuracy;
  obj["precision"] = report.precision;
  obj["recall"] = report.recall;
  obj["f1"] = report.f1;
  obj["macro_precision"] = report.macro.precision;
  obj["macro_recall"] = report.macro.recall;
  obj["macro_f1"] = report.macro.f1;
  ordered_json per_class = ordered_json::array();
  ordered_json support = ordered_json::array();
  for (int c = 0; c < metrics::kNumClasses; ++c) {
    const auto& m = report.per_class[static_cast<std::size_t>(c)];
    ordered_json row;
    row["class"] = data::class_name(c);
    row["precision"] = m.precision;
    row["recall"] = m.recall;
    row["f1"] = m.f1;
    row["support"] = m.support;
    per_class.push_back(row);
    support.push_back(m.support);
  }
  obj["per_class"] = per_class;
  obj["support"] = support;
  obj["config_hash"] = config_hash;
  store_json(path, obj);
}

ComparisonRow load_comparison_row(const std::filesystem::path& report_json) {
  auto obj = load_json(report_json);
  ComparisonRow row;
  try {
    row.model_id = obj.at("model_id").get<std::string>();
    row.avg_loss = obj.at("avg_loss").get<double>();
    row.accuracy = obj.at("accuracy").get<double>();
    row.precision = obj.at("precision").get<double>();
    row.recall = obj.at("recall").get<double>();
    row.f1 = obj.at("f1").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw_data("report " + report_json.string() + " is incomplete: " +
               e.what());
  }
  return row;
}

namespace {
void sort_rows(std::vector<ComparisonRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ComparisonRow& a, const ComparisonRow& b) {
                     return a.accuracy < b.accuracy;
                   });
}
}  // namespace

std::string render_comparison_table(std::vector<ComparisonRow> rows) {
  if (rows.empty()) throw_config("comparison needs at least one run");
  sort_rows(rows);
  std::size_t name_w = 5;
  for (const auto& r : rows) name_w = std::max(name_w, r.model_id.size());

  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(name_w + 2)) << "Model"
      << std::right << std::setw(10) << "Ave. Loss" << std::setw(10)
      << "Accuracy" << std::setw(11) << "Precision" << std::setw(8)
      << "Recall" << std::setw(10) << "F1-Score" << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(name_w + 2)) << r.model_id
        << std::right << std::setw(10) << fixed4(r.avg_loss) << std::setw(10)
        << fixed4(r.accuracy) << std::setw(11) << fixed4(r.precision)
        << std::setw(8) << fixed4(r.recall) << std::setw(10) << fixed4(r.f1)
        << '\n';
  }
  return out.str();
}

void write_comparison_csv(const std::filesystem::path& path,
                          std::vector<ComparisonRow> rows) {
  if (rows.empty()) throw_config("comparison needs at least one run");
  sort_rows(rows);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_data("cannot open for writing: " + path.string());
  out << "model,avg_loss,accuracy,precision,recall,f1\n";
  for (const auto& r : rows) {
    out << r.model_id << ',' << fixed4(r.avg_loss) << ','
        << fixed4(r.accuracy) << ',' << fixed4(r.precision) << ','
        << fixed4(r.recall) << ',' << fixed4(r.f1) << '\n';
  }
  if (!out.flush()) throw_data("failed writing " + path.string());
}

namespace {

struct PlotGeom {
  double x0 = 70, y0 = 40, width = 640, height = 380;

  double x(double epoch, int max_epoch) const {
    if (max_epoch <= 0) return x0 + width / 2;
    return x0 + width * epoch / max_epoch;
  }
  double y_loss(double v, double max_loss) const {
    return y0 + height * (1.0 - v / max_loss);
  }
  double y_acc(double v) const { return y0 + height * (1.0 - v); }
};

void polyline(std::ostringstream& svg, const std::string& series_id,
              const std::string& color,
              const std::vector<std::pair<double, double>>& pts) {
  svg << "  <polyline class=\"series\" data-series=\"" << series_id
      << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" "
      << "points=\"";
  for (const auto& [x, y] : pts) svg << x << ',' << y << ' ';
  svg << "\"/>\n";
  for (const auto& [x, y] : pts) {
    svg << "  <circle cx=\"" << x << "\" cy=\"" << y
        << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
  }
}

}  // namespace

void write_curves_svg(const std::filesystem::path& path,
                      const std::vector<train::EpochRecord>& records,
                      const std::string& title) {
  if (records.empty()) throw_data("no epochs to plot");
  PlotGeom g;
  const int max_epoch = records.back().epoch;
  double max_loss = 1e-9;
  for (const auto& r : records) {
    max_loss = std::max({max_loss, r.train_loss, r.val_loss});
  }
  max_loss *= 1.05;

  std::vector<std::pair<double, double>> train_loss, val_loss, train_acc,
      val_acc;
  for (const auto& r : records) {
    double x = g.x(r.epoch, max_epoch);
    train_loss.emplace_back(x, g.y_loss(r.train_loss, max_loss));
    val_loss.emplace_back(x, g.y_loss(r.val_loss, max_loss));
    train_acc.emplace_back(x, g.y_acc(r.train_acc));
    val_acc.emplace_back(x, g.y_acc(r.val_acc));
  }

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" "
         "height=\"500\" viewBox=\"0 0 800 500\">\n";
  svg << "  <rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
  svg << "  <text x=\"400\" y=\"24\" text-anchor=\"middle\" "
         "font-size=\"16\">" << title << " Loss VS Accuracy</text>\n";
  // Axes.
  svg << "  <line x1=\"" << g.x0 << "\" y1=\"" << g.y0 << "\" x2=\"" << g.x0
      << "\" y2=\"" << g.y0 + g.height << "\" stroke=\"black\"/>\n";
  svg << "  <line x1=\"" << g.x0 + g.width << "\" y1=\"" << g.y0
      << "\" x2=\"" << g.x0 + g.width << "\" y2=\"" << g.y0 + g.height
      << "\" stroke=\"black\"/>\n";
  svg << "  <line x1=\"" << g.x0 << "\" y1=\"" << g.y0 + g.height
      << "\" x2=\"" << g.x0 + g.width << "\" y2=\"" << g.y0 + g.height
      << "\" stroke=\"black\"/>\n";
  svg << "  <text x=\"20\" y=\"" << g.y0 + g.height / 2
      << "\" font-size=\"12\" transform=\"rotate(-90 20 "
      << g.y0 + g.height / 2 << ")\" text-anchor=\"middle\">loss</text>\n";
  svg << "  <text x=\"780\" y=\"" << g.y0 + g.height / 2
      << "\" font-size=\"12\" transform=\"rotate(90 780 "
      << g.y0 + g.height / 2 << ")\" text-anchor=\"middle\">accuracy</text>\n";
  svg << "  <text x=\"" << g.x0 + g.width / 2 << "\" y=\""
      << g.y0 + g.height + 32 << "\" font-size=\"12\" "
      << "text-anchor=\"middle\">epoch</text>\n";
  // Loss-axis ticks.
  for (int i = 0; i <= 4; ++i) {
    double frac = i / 4.0;
    double y = g.y0 + g.height * (1.0 - frac);
    svg << "  <text x=\"" << g.x0 - 8 << "\" y=\"" << y + 4
        << "\" font-size=\"10\" text-anchor=\"end\">"
        << fixed4(max_loss * frac) << "</text>\n";
    svg << "  <text x=\"" << g.x0 + g.width + 8 << "\" y=\"" << y + 4
        << "\" font-size=\"10\">" << fixed4(frac) << "</text>\n";
  }

  polyline(svg, "train_loss", "#c0392b", train_loss);
  polyline(svg, "val_loss", "#e67e22", val_loss);
  polyline(svg, "train_acc", "#2980b9", train_acc);
  polyline(svg, "val_acc", "#27ae60", val_acc);

  // Legend.
  const char* names[4] = {"train_loss", "val_loss", "train_acc", "val_acc"};
  const char* colors[4] = {"#c0392b", "#e67e22", "#2980b9", "#27ae60"};
  for (int i = 0; i < 4; ++i) {
    double y = 460;
    double x = 120 + 150.0 * i;
    svg << "  <line x1=\"" << x << "\" y1=\"" << y << "\" x2=\"" << x + 24
        << "\" y2=\"" << y << "\" stroke=\"" << colors[i]
        << "\" stroke-width=\"3\"/>\n";
    svg << "  <text x=\"" << x + 30 << "\" y=\"" << y + 4
        << "\" font-size=\"12\">" << names[i] << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw_data("cannot open for writing: " + path.string());
  out << svg.str();
  if (!out.flush()) throw_data("failed writing " + path.string());
}

RunLock::RunLock(std::filesystem::path path) : path_(std::move(path)) {
  int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    throw_runtime("run directory is locked (another training in progress?): " +
                  path_.string());
  }
  std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

RunLock::~RunLock() {
  std::error_code ec;
  std::filesystem::remove(path_, ec);
}

}  // namespace mribench::report
