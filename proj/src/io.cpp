#include "dyncon/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dyncon::io {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    return out;
}

double parse_double(const std::string& s, const std::string& context) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw std::runtime_error("cannot parse number '" + s + "' in " + context);
    }
}

}  // namespace

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_session(const SubjectSession& session, const std::string& data_path,
                   const std::string& annotation_path) {
    auto data = open_out(data_path);
    for (std::size_t j = 0; j < session.node_labels.size(); ++j)
        data << (j ? "\t" : "") << session.node_labels[j];
    data << "\n";
    for (int i = 0; i < session.n_timepoints(); ++i) {
        for (int j = 0; j < session.n_nodes(); ++j)
            data << (j ? "\t" : "") << fmt(session.data(i, j));
        data << "\n";
    }
    auto ann = open_out(annotation_path);
    for (const auto& label : session.task_labels) ann << label << "\n";
}

void write_precision_sequence(const PrecisionSequence& prec, const std::string& path) {
    auto out = open_out(path);
    out << "# lambda1=" << fmt(prec.lambda1) << " lambda2=" << fmt(prec.lambda2)
        << " converged=" << (prec.converged ? 1 : 0) << " iterations=" << prec.iterations
        << " objective=" << fmt(prec.objective_value) << "\n";
    for (int i = 0; i < prec.n_timepoints(); ++i) {
        out << "# t=" << (i + 1) << "\n";
        const auto& m = prec.matrices[i];
        for (int j = 0; j < m.rows(); ++j) {
            for (int k = 0; k < m.cols(); ++k) out << (k ? "\t" : "") << fmt(m(j, k));
            out << "\n";
        }
    }
}

PrecisionSequence read_precision_sequence(const std::string& path) {
    auto in = open_in(path);
    PrecisionSequence prec;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# lambda1=", 0) != 0)
        throw std::runtime_error(path + ": missing metadata line");
    {
        std::istringstream ss(line.substr(2));
        std::string tok;
        while (ss >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
            if (key == "lambda1") prec.lambda1 = parse_double(value, path);
            else if (key == "lambda2") prec.lambda2 = parse_double(value, path);
            else if (key == "converged") prec.converged = value == "1";
            else if (key == "iterations") prec.iterations = std::stoi(value);
            else if (key == "objective") prec.objective_value = parse_double(value, path);
        }
    }
    std::vector<std::vector<std::string>> block;
    auto flush_block = [&]() {
        if (block.empty()) return;
        const int p = static_cast<int>(block.size());
        Matrix m(p, p);
        for (int j = 0; j < p; ++j) {
            if (static_cast<int>(block[j].size()) != p)
                throw std::runtime_error(path + ": ragged matrix block");
            for (int k = 0; k < p; ++k) m(j, k) = parse_double(block[j][k], path);
        }
        prec.matrices.push_back(std::move(m));
        block.clear();
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# t=", 0) == 0) {
            flush_block();
            continue;
        }
        block.push_back(split(line, '\t'));
    }
    flush_block();
    prec.support = extract_support(prec.matrices);
    return prec;
}

void write_stacked(const StackedLaplacians& stacked, const std::string& matrix_path,
                   const std::string& meta_path) {
    auto out = open_out(matrix_path);
    for (int c = 0; c < stacked.edge_index.n_edges(); ++c)
        out << (c ? "\t" : "") << stacked.edge_index.edge_name(c, stacked.node_labels);
    out << "\n";
    for (long r = 0; r < stacked.matrix.rows(); ++r) {
        for (long c = 0; c < stacked.matrix.cols(); ++c)
            out << (c ? "\t" : "") << fmt(stacked.matrix(r, c));
        out << "\n";
    }
    auto meta = open_out(meta_path);
    meta << "subject_id\tacquisition\ttime\ttask\n";
    for (const auto& m : stacked.row_meta)
        meta << m.subject_id << "\t" << m.acquisition << "\t" << m.time << "\t" << m.task << "\n";
}

void write_screen_result(const ScreenResult& screen, const EdgeIndex& edge_index,
                         const std::vector<std::string>& node_labels, const std::string& path) {
    auto out = open_out(path);
    out << "edge\tselection_frequency\tselected\n";
    std::vector<char> selected(edge_index.n_edges(), 0);
    for (int e : screen.selected_edges) selected[e] = 1;
    for (int e = 0; e < edge_index.n_edges(); ++e)
        out << edge_index.edge_name(e, node_labels) << "\t" << fmt(screen.selection_frequency[e])
            << "\t" << int(selected[e]) << "\n";
}

void write_lda_model(const LdaModel& model, const EdgeIndex& edge_index,
                     const std::vector<std::string>& node_labels, const std::string& path) {
    auto out = open_out(path);
    out << "contrast\t" << model.contrast.positive_label << "\t" << model.contrast.negative_label
        << "\n";
    out << "shrinkage\t" << fmt(model.shrinkage) << "\n";
    out << "intercept\t" << fmt(model.intercept) << "\n";
    out << "edge\tweight\tmean\tsd\n";
    for (std::size_t i = 0; i < model.selected_edges.size(); ++i)
        out << edge_index.edge_name(model.selected_edges[i], node_labels) << "\t"
            << fmt(model.weights[static_cast<long>(i)]) << "\t"
            << fmt(model.feature_means[static_cast<long>(i)]) << "\t"
            << fmt(model.feature_sds[static_cast<long>(i)]) << "\n";
}

LdaModel read_lda_model(const std::string& path, const EdgeIndex& edge_index,
                        const std::vector<std::string>& node_labels) {
    auto in = open_in(path);
    LdaModel model;
    std::string line;
    std::vector<double> weights, means, sds;

    // edge name -> column lookup
    std::vector<std::string> names(edge_index.n_edges());
    for (int c = 0; c < edge_index.n_edges(); ++c) names[c] = edge_index.edge_name(c, node_labels);

    bool in_table = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split(line, '\t');
        if (!in_table) {
            if (fields[0] == "contrast" && fields.size() == 3) {
                model.contrast = {fields[1], fields[2]};
            } else if (fields[0] == "shrinkage" && fields.size() == 2) {
                model.shrinkage = parse_double(fields[1], path);
            } else if (fields[0] == "intercept" && fields.size() == 2) {
                model.intercept = parse_double(fields[1], path);
            } else if (fields[0] == "edge") {
                in_table = true;
            } else {
                throw std::runtime_error(path + ": unexpected line '" + line + "'");
            }
            continue;
        }
        if (fields.size() != 4) throw std::runtime_error(path + ": bad model row '" + line + "'");
        const auto it = std::find(names.begin(), names.end(), fields[0]);
        if (it == names.end())
            throw std::runtime_error(path + ": unknown edge name '" + fields[0] + "'");
        model.selected_edges.push_back(static_cast<int>(it - names.begin()));
        weights.push_back(parse_double(fields[1], path));
        means.push_back(parse_double(fields[2], path));
        sds.push_back(parse_double(fields[3], path));
    }
    model.weights = Eigen::Map<Vector>(weights.data(), weights.size());
    model.feature_means = Eigen::Map<Vector>(means.data(), means.size());
    model.feature_sds = Eigen::Map<Vector>(sds.data(), sds.size());
    return model;
}

void write_trajectory(const Matrix& trajectory_k_by_n, const std::vector<std::string>& task_labels,
                      const std::string& column_prefix, const std::string& path) {
    if (static_cast<long>(task_labels.size()) != trajectory_k_by_n.cols())
        throw std::invalid_argument("write_trajectory: label/length mismatch");
    auto out = open_out(path);
    out << "time\ttask_label";
    for (long c = 0; c < trajectory_k_by_n.rows(); ++c) out << "\t" << column_prefix << (c + 1);
    out << "\n";
    for (long i = 0; i < trajectory_k_by_n.cols(); ++i) {
        out << (i + 1) << "\t" << task_labels[i];
        for (long c = 0; c < trajectory_k_by_n.rows(); ++c)
            out << "\t" << fmt(trajectory_k_by_n(c, i));
        out << "\n";
    }
}

void write_network(const std::vector<EdgeWeight>& edges,
                   const std::vector<std::string>& node_labels, const std::string& path) {
    auto out = open_out(path);
    out << "node_j\tnode_k\tweight\trank\n";
    for (const auto& e : edges)
        out << node_labels[e.j] << "\t" << node_labels[e.k] << "\t" << fmt(e.weight) << "\t"
            << e.rank << "\n";
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path + ": empty manifest");
    if (split(line, '\t') !=
        std::vector<std::string>{"subject_id", "acquisition", "data_path", "annotation_path"})
        throw std::runtime_error(path +
                                 ": manifest header must be subject_id\\tacquisition\\tdata_path"
                                 "\\tannotation_path");
    std::vector<ManifestEntry> entries;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split(line, '\t');
        if (fields.size() != 4)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 4 tab-separated fields");
        entries.push_back({fields[0], fields[1], fields[2], fields[3]});
    }
    return entries;
}

void write_manifest(const std::vector<ManifestEntry>& entries, const std::string& path) {
    auto out = open_out(path);
    out << "subject_id\tacquisition\tdata_path\tannotation_path\n";
    for (const auto& e : entries)
        out << e.subject_id << "\t" << e.acquisition << "\t" << e.data_path << "\t"
            << e.annotation_path << "\n";
}

void write_ground_truth(const GroundTruth& truth, const std::string& path) {
    auto out = open_out(path);
    out << "# change_points=";
    for (std::size_t i = 0; i < truth.change_points.size(); ++i)
        out << (i ? "," : "") << truth.change_points[i];
    out << "\n# segment_labels=";
    for (std::size_t i = 0; i < truth.segment_labels.size(); ++i)
        out << (i ? "," : "") << truth.segment_labels[i];
    out << "\n# discriminative_edges=";
    for (std::size_t i = 0; i < truth.discriminative_edges.size(); ++i)
        out << (i ? "," : "") << truth.discriminative_edges[i].first << "-"
            << truth.discriminative_edges[i].second;
    out << "\n";
    for (int i = 0; i < truth.n_timepoints(); ++i) {
        out << "# t=" << (i + 1) << "\n";
        const auto& m = truth.precision[i];
        for (int j = 0; j < m.rows(); ++j) {
            for (int k = 0; k < m.cols(); ++k) out << (k ? "\t" : "") << fmt(m(j, k));
            out << "\n";
        }
    }
}

GroundTruth read_ground_truth(const std::string& path) {
    auto in = open_in(path);
    GroundTruth truth;
    std::string line;
    std::vector<std::vector<std::string>> block;
    auto flush_block = [&]() {
        if (block.empty()) return;
        const int p = static_cast<int>(block.size());
        Matrix m(p, p);
        for (int j = 0; j < p; ++j) {
            if (static_cast<int>(block[j].size()) != p)
                throw std::runtime_error(path + ": ragged matrix block");
            for (int k = 0; k < p; ++k) m(j, k) = parse_double(block[j][k], path);
        }
        truth.precision.push_back(std::move(m));
        block.clear();
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# change_points=", 0) == 0) {
            for (const auto& tok : split(line.substr(16), ','))
                if (!tok.empty()) truth.change_points.push_back(std::stoi(tok));
        } else if (line.rfind("# segment_labels=", 0) == 0) {
            for (const auto& tok : split(line.substr(17), ','))
                if (!tok.empty()) truth.segment_labels.push_back(tok);
        } else if (line.rfind("# discriminative_edges=", 0) == 0) {
            for (const auto& tok : split(line.substr(23), ',')) {
                if (tok.empty()) continue;
                const auto dash = tok.find('-');
                truth.discriminative_edges.emplace_back(std::stoi(tok.substr(0, dash)),
                                                        std::stoi(tok.substr(dash + 1)));
            }
        } else if (line.rfind("# t=", 0) == 0) {
            flush_block();
        } else {
            block.push_back(split(line, '\t'));
        }
    }
    flush_block();
    // Rebuild per-segment supports from the matrices.
    int segment = -1;
    for (int i = 0; i < truth.n_timepoints(); ++i) {
        if (i == 0 || (truth.precision[i] - truth.precision[i - 1]).cwiseAbs().maxCoeff() >
                          kSupportEps) {
            ++segment;
            std::vector<std::pair<int, int>> edges;
            const auto& m = truth.precision[i];
            for (int j = 0; j < m.rows(); ++j)
                for (int k = j + 1; k < m.cols(); ++k)
                    if (std::abs(m(j, k)) > kSupportEps) edges.emplace_back(j, k);
            truth.true_edges.push_back(std::move(edges));
        }
    }
    return truth;
}

}  // namespace dyncon::io
