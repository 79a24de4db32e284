/* Compiles the public header as C and runs a two-grid solve. */
#include <phicgc/phicgc.h>

#include <stdio.h>
#include <stdlib.h>

int main(void) {
  phicgc_problem* p = NULL;
  phicgc_hierarchy* h = NULL;
  phicgc_problem_info info;
  phicgc_cgc_options opt;
  phicgc_cgc_report rep;
  double *v, *g, *y, *ref, err = 0.0;
  int rc = 1;

  if (phicgc_problem_heat1d(128, &p) != PHICGC_OK) return 1;
  phicgc_problem_info_get(p, &info);
  v = malloc(sizeof(double) * (size_t)info.dim);
  g = malloc(sizeof(double) * (size_t)info.dim);
  y = malloc(sizeof(double) * (size_t)info.dim);
  ref = malloc(sizeof(double) * (size_t)info.dim);
  phicgc_problem_vectors(p, v, g);
  if (phicgc_hierarchy_build(p, 2, PHICGC_TRANSFER_CUBIC_SPLINE, &h) != PHICGC_OK) goto done;
  phicgc_cgc_options_default(&opt);
  if (phicgc_cgc_solve(h, v, g, info.T, &opt, y, &rep) != PHICGC_OK) {
    fprintf(stderr, "cgc failed: %s\n", phicgc_last_error());
    goto done;
  }
  phicgc_reference_solution(p, info.T, ref);
  phicgc_relative_error(y, ref, info.dim, &err);
  printf("error %.3e, matvecs %llu + %llu\n", err, (unsigned long long)rep.levels[0].matvecs,
         (unsigned long long)rep.levels[1].matvecs);
  rc = err < 1e-4 ? 0 : 1;
done:
  phicgc_hierarchy_destroy(h);
  phicgc_problem_destroy(p);
  free(v);
  free(g);
  free(y);
  free(ref);
  return rc;
}
