#pragma once

#include "qdense/certificate.hpp"
#include "qdense/denseness.hpp"
#include "qdense/errors.hpp"
#include "qdense/forms.hpp"
#include "qdense/io.hpp"
#include "qdense/oracle.hpp"
#include "qdense/padic.hpp"
#include "qdense/residues.hpp"
