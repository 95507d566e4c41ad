// placeholder main; full CLI below
int main() { return 0; }
