void init3(double *A, int N)
{
#pragma omp parallel for
  for (k=0;k<=N;k++)
    A[k] = k;
}
