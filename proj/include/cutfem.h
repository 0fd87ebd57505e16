#ifndef CUTFEM_H
#define CUTFEM_H

/* C interface of the cut finite element elasticity library.
 *
 * Every function returns a status code; 0 is success. On failure the message
 * of the last error on the calling thread is available from
 * cutfem_last_error(). Models are opaque handles owned by the caller. */

#include <stddef.h>

#if defined(_WIN32)
#define CUTFEM_API __declspec(dllexport)
#elif defined(__GNUC__)
#define CUTFEM_API __attribute__((visibility("default")))
#else
#define CUTFEM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cutfem_status {
  CUTFEM_OK = 0,
  CUTFEM_INVALID_ARGUMENT = 1,
  CUTFEM_INVALID_GEOMETRY = 2,
  CUTFEM_COVERAGE = 3,
  CUTFEM_UNSUPPORTED = 4,
  CUTFEM_SOLVER = 5,
  CUTFEM_CONFIG = 6,
  CUTFEM_IO = 7,
  CUTFEM_INTERNAL = 8,
  /* cutfem_run finished, but at least one run of the sweep failed. */
  CUTFEM_RUN_FAILED = 9
} cutfem_status;

typedef enum cutfem_family { CUTFEM_QUAD = 0, CUTFEM_TRI = 1 } cutfem_family;

typedef struct cutfem_model cutfem_model;

/* Library version, e.g. "0.1.0". */
CUTFEM_API const char* cutfem_version(void);

/* Message of the last failed call on this thread ("" if none). */
CUTFEM_API const char* cutfem_last_error(void);

/* Model from a JSON configuration (the file format of the command line
 * tool). The first entries of mesh.p, mesh.h and mesh.theta are used. */
CUTFEM_API int cutfem_model_from_config(const char* json_text, cutfem_model** out);

/* Steel rectangle [x0,x1] x [y0,y1] clamped on the left side, with default
 * stabilization. */
CUTFEM_API int cutfem_model_rectangle(double x0, double y0, double x1, double y1, cutfem_family family, int p,
                                      double h, double theta, cutfem_model** out);

CUTFEM_API void cutfem_model_destroy(cutfem_model* model);

CUTFEM_API int cutfem_model_num_dofs(const cutfem_model* model, int* out);

/* Sets a constant body force (N/m^3) and a traction (Pa) on Neumann edges. */
CUTFEM_API int cutfem_model_set_load(cutfem_model* model, double fx, double fy, double tx, double ty);

/* Solves the static problem; the solution is kept in the model. The strain
 * energy of the solution is written to energy (may be NULL). */
CUTFEM_API int cutfem_model_solve_static(cutfem_model* model, double* energy);

/* Copies the current solution (interleaved x, y per node) into values, which
 * must hold num_dofs entries. */
CUTFEM_API int cutfem_model_get_solution(const cutfem_model* model, double* values, size_t count);

/* Displacement of the current solution at (x, y). */
CUTFEM_API int cutfem_model_displacement(const cutfem_model* model, double x, double y, double* ux, double* uy);

/* Smallest k eigenvalues of A_h u = lambda M_h u, ascending. */
CUTFEM_API int cutfem_model_eigenvalues(const cutfem_model* model, int k, double* values);

/* Condition number max|lambda| / min|lambda| of the stabilized stiffness
 * matrix; scaled != 0 applies diagonal scaling first. */
CUTFEM_API int cutfem_model_condition(const cutfem_model* model, int scaled, double* kappa);

/* Legacy VTK file of the mesh and the current solution. */
CUTFEM_API int cutfem_model_write_vtk(const cutfem_model* model, const char* path);

/* Runs a command of the command line tool. options_json is an object of
 * option values keyed by option name, e.g. {"p": "1,2", "out": "res"}. */
CUTFEM_API int cutfem_run(const char* command, const char* options_json);

#ifdef __cplusplus
}
#endif

#endif
