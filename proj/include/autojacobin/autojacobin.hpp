#pragma once

#include "autojacobin/errors.hpp"
#include "autojacobin/gradcheck.hpp"
#include "autojacobin/hamming.hpp"
#include "autojacobin/matrix_io.hpp"
#include "autojacobin/network.hpp"
#include "autojacobin/report.hpp"
#include "autojacobin/svg_plot.hpp"
#include "autojacobin/synthetic.hpp"
#include "autojacobin/tangent.hpp"
#include "autojacobin/toy.hpp"
#include "autojacobin/trainer.hpp"
#include "autojacobin/variants.hpp"
