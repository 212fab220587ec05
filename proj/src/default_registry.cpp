#include "cgfam/callgraph.hpp"

namespace cgfam {

namespace {

constexpr std::string_view kDefaultRegistry = R"(# Desk-scale sensitive API registry (64 entries).
# Order is significant: line i is profile row i and pixels 4i..4i+3.
android.telephony.TelephonyManager.getDeviceId
android.telephony.TelephonyManager.getLine1Number
android.telephony.TelephonyManager.getSubscriberId
android.telephony.TelephonyManager.getSimSerialNumber
android.telephony.TelephonyManager.getCellLocation
android.telephony.TelephonyManager.getNetworkOperator
android.telephony.SmsManager.getDefault
android.telephony.SmsManager.sendTextMessage
android.telephony.SmsManager.sendMultipartTextMessage
android.telephony.SmsManager.divideMessage
android.location.LocationManager.getLastKnownLocation
android.location.LocationManager.requestLocationUpdates
android.location.Location.getLatitude
android.location.Location.getLongitude
android.net.ConnectivityManager.getActiveNetworkInfo
android.net.NetworkInfo.isConnected
android.net.wifi.WifiManager.getConnectionInfo
android.net.wifi.WifiInfo.getMacAddress
java.net.URL.openConnection
java.net.URLConnection.connect
java.net.HttpURLConnection.getInputStream
java.net.Socket.getOutputStream
org.apache.http.impl.client.DefaultHttpClient.execute
android.os.Environment.getExternalStorageDirectory
java.io.File.createNewFile
java.io.File.delete
java.io.FileOutputStream.write
java.io.FileInputStream.read
android.content.Context.openFileOutput
android.content.ContentResolver.query
android.content.ContentResolver.delete
android.content.ContentResolver.insert
android.provider.Settings$Secure.getString
android.accounts.AccountManager.getAccounts
android.content.pm.PackageManager.getInstalledPackages
android.content.pm.PackageManager.setComponentEnabledSetting
android.app.ActivityManager.getRunningTasks
android.app.ActivityManager.killBackgroundProcesses
android.content.Context.startService
android.content.Context.registerReceiver
android.app.AlarmManager.set
android.app.NotificationManager.notify
android.app.PendingIntent.getBroadcast
android.content.Intent.setAction
android.webkit.WebView.loadUrl
android.webkit.WebSettings.setJavaScriptEnabled
android.webkit.WebView.addJavascriptInterface
android.widget.TextView.setText
android.media.AudioRecord.startRecording
android.media.MediaRecorder.start
android.hardware.Camera.open
android.os.PowerManager$WakeLock.acquire
java.lang.Runtime.exec
java.lang.ProcessBuilder.start
java.lang.System.loadLibrary
android.app.admin.DevicePolicyManager.lockNow
javax.crypto.Cipher.getInstance
javax.crypto.Cipher.init
javax.crypto.Cipher.doFinal
javax.crypto.spec.SecretKeySpec.<init>
java.security.MessageDigest.getInstance
java.security.MessageDigest.digest
java.lang.reflect.Method.invoke
dalvik.system.DexClassLoader.loadClass
)";

}  // namespace

std::string_view default_registry_document() { return kDefaultRegistry; }

const ApiRegistry& default_registry() {
    static const ApiRegistry registry = load_registry(kDefaultRegistry);
    return registry;
}

}  // namespace cgfam
