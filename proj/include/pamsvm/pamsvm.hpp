#ifndef PAMSVM_PAMSVM_HPP
#define PAMSVM_PAMSVM_HPP

#include <pamsvm/channel.hpp>
#include <pamsvm/error.hpp>
#include <pamsvm/features.hpp>
#include <pamsvm/lms.hpp>
#include <pamsvm/metrics.hpp>
#include <pamsvm/model_io.hpp>
#include <pamsvm/scenario.hpp>
#include <pamsvm/svm.hpp>
#include <pamsvm/sweep.hpp>
#include <pamsvm/txgen.hpp>

#endif
