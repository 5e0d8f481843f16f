public class Main {
    static String even() {
        return helper("even");
    }
    static String odd() {
        return helper("odd");
    }
    static String helper(String tag) {
        return "branch:" + tag;
    }
    public static void main(String[] args) {
        String path = System.getenv("CALLWITNESS_TRACE_OUT");
        int sum = 0;
        for (int i = 0; i < path.length(); i++) {
            sum = sum + path.charAt(i);
        }
        if (sum % 2 == 0) {
            System.out.println(even());
        } else {
            System.out.println(odd());
        }
    }
}
