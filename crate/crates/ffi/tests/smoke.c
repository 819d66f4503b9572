/* Minimal C consumer of the generated header: builds a tone, takes its
 * Wigner distribution, checks the energy integral, and runs one lossless
 * sampling query. Exits 0 on success. */

#include <math.h>
#include <stdio.h>
#include <string.h>

#include "tfimmse.h"

static int report(const char *stage) {
  char msg[256];
  tfi_last_error(msg, sizeof msg);
  fprintf(stderr, "%s: %s\n", stage, msg);
  return 1;
}

int main(void) {
  if (strlen(tfi_version()) == 0)
    return 1;

  enum { N = 64 };
  double re[N], im[N];
  for (int i = 0; i < N; i++) {
    re[i] = cos(0.2 * i);
    im[i] = sin(0.2 * i);
  }

  TfiDist *dist = NULL;
  if (tfi_wigner(re, im, N, 1.0, false, &dist) != TFI_STATUS_OK)
    return report("wigner");
  if (tfi_dist_time_bins(dist) != N || tfi_dist_freq_bins(dist) != N)
    return 1;

  double ire = 0.0, iim = 0.0;
  if (tfi_dist_integral(dist, &ire, &iim) != TFI_STATUS_OK)
    return report("integral");
  tfi_dist_free(dist);
  /* Unit-modulus samples at rate 1: the grid integral is the length. */
  if (fabs(ire - (double)N) > 1e-6 || fabs(iim) > 1e-6)
    return 1;

  double mmse = -1.0, recon = -1.0;
  if (tfi_sampling_mmse(1.0, 0.2, 0.0, 0.5, 1.0 / 512.0, 0.5, 0.25, 4, &mmse,
                        &recon) != TFI_STATUS_OK)
    return report("sampling");
  /* recon carries the band-edge grid quantization. */
  if (fabs(mmse) > 1e-9 || fabs(recon - 0.4) > 2e-3)
    return 1;

  printf("ok\n");
  return 0;
}
