class Counter {
    int value;
    Counter(int start) {
        value = start;
    }
    int bump(int n) {
        value = value + n;
        return value;
    }
    int read() {
        return value;
    }
}
public class Main {
    public static void main(String[] args) {
        Counter c = new Counter(10);
        c.bump(1);
        c.bump(2);
        System.out.println(c.read());
    }
}
