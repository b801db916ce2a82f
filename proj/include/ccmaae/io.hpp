#pragma once

#include <string>

#include "ccmaae/aae.hpp"
#include "ccmaae/data.hpp"
#include "ccmaae/types.hpp"

// Comma-separated text exports with header rows. All numbers are written
// with shortest round-trip formatting ("%.17g"), so identical values always
// produce identical bytes.

namespace ccmaae {

std::string format_double(double v);

/// Header: epoch,reconstruction_loss,critic_loss,adversarial_loss,mean_membership,validation_loss
std::string history_to_csv(const TrainHistory& history);

/// Header: <index_name>,pixel_0,...,pixel_{w-1}; one decoded row per line.
std::string pixel_rows_to_csv(const std::string& index_name, const Matrix& rows);

/// Header: u,v,label.
std::string chart_to_csv(const Matrix& uv, const IntVector& labels);

/// Header: pixel_0,...,pixel_{w-1},label.
std::string dataset_to_csv(const ImageDataset& ds);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace ccmaae
