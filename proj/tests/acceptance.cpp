// placeholder acceptance
int main() { return 0; }
