#include "dyncon/ingest.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace dyncon {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, '\t')) out.push_back(field);
    if (!line.empty() && line.back() == '\t') out.emplace_back();
    return out;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

SubjectSession load_session(const std::string& data_path, const std::string& annotation_path,
                            const std::string& subject_id, const std::string& acquisition,
                            double sampling_interval) {
    std::ifstream data_file(data_path);
    if (!data_file) throw std::runtime_error("cannot open data file: " + data_path);

    std::string line;
    if (!std::getline(data_file, line))
        throw std::runtime_error(data_path + ": empty file, expected header row");
    auto labels = split_tabs(strip_cr(line));
    const int p = static_cast<int>(labels.size());
    std::set<std::string> unique(labels.begin(), labels.end());
    if (unique.size() != labels.size())
        throw std::runtime_error(data_path + ": duplicate node label in header");

    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(data_file, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_tabs(line);
        if (static_cast<int>(fields.size()) != p)
            throw std::runtime_error(data_path + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(p) + " fields, got " +
                                     std::to_string(fields.size()));
        std::vector<double> row(p);
        for (int j = 0; j < p; ++j) {
            std::size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(fields[j], &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != fields[j].size() || fields[j].empty())
                throw std::runtime_error(data_path + ":" + std::to_string(lineno) +
                                         ": non-numeric cell '" + fields[j] + "' in column " +
                                         std::to_string(j + 1));
            if (!std::isfinite(v))
                throw std::runtime_error(data_path + ": non-finite value at row " +
                                         std::to_string(lineno - 1) + ", col " +
                                         std::to_string(j + 1));
            row[j] = v;
        }
        rows.push_back(std::move(row));
    }
    const int n = static_cast<int>(rows.size());

    std::ifstream ann_file(annotation_path);
    if (!ann_file) throw std::runtime_error("cannot open annotation file: " + annotation_path);
    std::vector<std::string> task_labels;
    while (std::getline(ann_file, line)) {
        line = strip_cr(line);
        if (line.empty() && ann_file.eof()) break;
        task_labels.push_back(line);
    }
    if (static_cast<int>(task_labels.size()) != n)
        throw std::runtime_error(annotation_path + ": annotation length mismatch (" +
                                 std::to_string(task_labels.size()) + " labels for " +
                                 std::to_string(n) + " data rows in " + data_path + ")");

    SubjectSession session;
    session.subject_id = subject_id;
    session.acquisition = acquisition;
    session.node_labels = std::move(labels);
    session.task_labels = std::move(task_labels);
    session.sampling_interval = sampling_interval;
    session.data.resize(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) session.data(i, j) = rows[i][j];
    validate_session(session);
    return session;
}

int highpass_basis_size(int n, double sampling_interval, double cutoff_hz) {
    return static_cast<int>(std::floor(2.0 * n * sampling_interval * cutoff_hz)) + 1;
}

SubjectSession highpass_filter(const SubjectSession& session, double cutoff_hz) {
    validate_session(session);
    if (!(cutoff_hz > 0.0)) throw std::invalid_argument("highpass cutoff must be positive");
    const double nyquist = 0.5 / session.sampling_interval;
    if (cutoff_hz >= nyquist)
        throw std::invalid_argument("highpass cutoff " + std::to_string(cutoff_hz) +
                                    " Hz at or above Nyquist " + std::to_string(nyquist) + " Hz");

    const int n = session.n_timepoints();
    const int n_basis = highpass_basis_size(n, session.sampling_interval, cutoff_hz);

    // DCT-II regressors; column m has frequency m / (2 n dt).
    Matrix basis(n, n_basis);
    for (int m = 0; m < n_basis; ++m)
        for (int t = 0; t < n; ++t)
            basis(t, m) = std::cos(M_PI * m * (2.0 * t + 1.0) / (2.0 * n));

    SubjectSession out = session;
    // The DCT vectors are mutually orthogonal, so least squares reduces to
    // independent projections.
    for (int m = 0; m < n_basis; ++m) {
        const Vector b = basis.col(m);
        const double bb = b.squaredNorm();
        out.data -= b * ((b.transpose() * out.data) / bb);
    }
    return out;
}

SubjectSession standardize(const SubjectSession& session) {
    validate_session(session);
    const int n = session.n_timepoints();
    const int p = session.n_nodes();
    SubjectSession out = session;
    for (int j = 0; j < p; ++j) {
        const double mean = session.data.col(j).mean();
        const double var = (session.data.col(j).array() - mean).square().sum() / (n - 1);
        if (!(var > 0.0))
            throw std::invalid_argument("node '" + session.node_labels[j] +
                                        "' has zero variance; cannot standardize");
        out.data.col(j) = (session.data.col(j).array() - mean) / std::sqrt(var);
    }
    return out;
}

}  // namespace dyncon
