void init(double *A, double *B, int N)
{
  int i;
#pragma omp parallel for
  for (i=0;i<=N;i++)
    A[i] = i;
#pragma omp parallel for
  for (i=0;i<=N;i++)
    B[i]=B[i]*2;
}
