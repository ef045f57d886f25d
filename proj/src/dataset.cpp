#include "lungpipe/dataset.hpp"

#include <cmath>

#include "lungpipe/errors.hpp"

namespace lungpipe {

const std::vector<std::string>& all_predictors() {
    static const std::vector<std::string> names = {"area",     "perimeter", "stddev",
                                                   "skewness", "kurtosis",  "entropy"};
    return names;
}

const std::vector<std::string>& three_predictors() {
    static const std::vector<std::string> names = {"entropy", "stddev", "perimeter"};
    return names;
}

std::vector<double> record_row(const FeatureRecord& rec,
                               const std::vector<std::string>& predictors) {
    std::vector<double> row;
    row.reserve(predictors.size());
    for (const auto& name : predictors) {
        if (name == "area") {
            row.push_back(rec.area);
        } else if (name == "perimeter") {
            row.push_back(rec.perimeter);
        } else if (name == "stddev") {
            row.push_back(rec.stddev);
        } else if (name == "skewness") {
            if (!rec.skewness)
                throw argument_error("row '" + rec.id + "': skewness unavailable");
            row.push_back(*rec.skewness);
        } else if (name == "kurtosis") {
            if (!rec.kurtosis)
                throw argument_error("row '" + rec.id + "': kurtosis unavailable");
            row.push_back(*rec.kurtosis);
        } else if (name == "entropy") {
            row.push_back(rec.entropy);
        } else {
            throw argument_error("unknown predictor '" + name + "'");
        }
    }
    return row;
}

Dataset make_dataset(const FeatureTable& table, const std::vector<std::string>& predictors) {
    table.validate();
    if (!table.has_labels())
        throw argument_error("make_dataset: feature table carries no labels");
    if (predictors.empty())
        throw argument_error("make_dataset: empty predictor list");

    Dataset data;
    data.feature_names = predictors;
    data.x = Matrix(table.records.size(), predictors.size());
    data.y.reserve(table.records.size());
    for (std::size_t i = 0; i < table.records.size(); ++i) {
        const auto row = record_row(table.records[i], predictors);
        for (std::size_t j = 0; j < row.size(); ++j)
            data.x(i, j) = row[j];
        data.y.push_back(*table.records[i].label);
        data.ids.push_back(table.records[i].id);
    }
    return data;
}

std::vector<double> Standardizer::apply_row(const std::vector<double>& row) const {
    if (row.size() != means.size())
        throw argument_error("standardizer: row width mismatch");
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j)
        out[j] = (row[j] - means[j]) / stddevs[j];
    return out;
}

Matrix Standardizer::apply(const Matrix& x) const {
    if (x.cols != means.size())
        throw argument_error("standardizer: matrix width mismatch");
    Matrix out(x.rows, x.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.cols; ++j)
            out(i, j) = (x(i, j) - means[j]) / stddevs[j];
    return out;
}

StandardizedDesign standardize(const Dataset& data) {
    if (data.n() < 2)
        throw argument_error("standardize: need at least 2 rows");

    Standardizer scaler;
    scaler.feature_names = data.feature_names;
    scaler.means.resize(data.p());
    scaler.stddevs.resize(data.p());
    for (std::size_t j = 0; j < data.p(); ++j) {
        double sum = 0;
        for (std::size_t i = 0; i < data.n(); ++i)
            sum += data.x(i, j);
        const double mean = sum / static_cast<double>(data.n());
        double ss = 0;
        for (std::size_t i = 0; i < data.n(); ++i) {
            const double d = data.x(i, j) - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(data.n()));
        if (sd == 0)
            throw argument_error("standardize: column '" + data.feature_names[j] +
                                 "' is constant");
        scaler.means[j] = mean;
        scaler.stddevs[j] = sd;
    }

    StandardizedDesign design;
    design.x = scaler.apply(data.x);
    design.y = data.y;
    design.feature_names = data.feature_names;
    design.scaler = std::move(scaler);
    return design;
}

StandardizedDesign raw_design(const Dataset& data) {
    StandardizedDesign design;
    design.x = data.x;
    design.y = data.y;
    design.feature_names = data.feature_names;
    return design;
}

std::vector<int> stratified_folds(const std::vector<int>& y, int folds, Rng& rng) {
    if (folds < 2)
        throw argument_error("stratified_folds: need at least 2 folds");
    std::vector<int> fold_of(y.size(), 0);
    for (int klass = 0; klass < 2; ++klass) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] == klass)
                rows.push_back(i);
        rng.shuffle(rows);
        for (std::size_t i = 0; i < rows.size(); ++i)
            fold_of[rows[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
    }
    return fold_of;
}

} // namespace lungpipe
